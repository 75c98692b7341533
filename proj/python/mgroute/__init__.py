"""Python surface of the mgroute multi-objective multigraph routing library."""

from _mgroute import (  # noqa: F401
    ContractError,
    Instance,
    check_prop1,
    chebyshev_scalarize,
    dominates,
    eval_tsp,
    eval_tsptw,
    exhaustive_pareto,
    generate,
    hv_gap,
    hv_reference,
    hypervolume,
    linear_scalarize,
    load_instances,
    nearest_neighbor,
    normalized_hv,
    pareto_filter,
    preference_grid,
    prune_linear,
    save_instances,
    solve,
    two_opt,
)

__all__ = [
    "ContractError",
    "Instance",
    "check_prop1",
    "chebyshev_scalarize",
    "dominates",
    "eval_tsp",
    "eval_tsptw",
    "exhaustive_pareto",
    "generate",
    "hv_gap",
    "hv_reference",
    "hypervolume",
    "linear_scalarize",
    "load_instances",
    "nearest_neighbor",
    "normalized_hv",
    "pareto_filter",
    "preference_grid",
    "prune_linear",
    "save_instances",
    "solve",
    "two_opt",
]
