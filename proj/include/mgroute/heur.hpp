#ifndef MGROUTE_HEUR_HPP
#define MGROUTE_HEUR_HPP

#include "mgroute/core.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/prune.hpp"
#include "mgroute/scalarize.hpp"

namespace mgroute {

// Constructive heuristics operate on a single-slot (pruned or simple)
// instance; ties break toward the lowest node index.

Tour nearest_neighbor(const MultiGraphInstance& inst_pruned,
                      const Preference& pref, int start = 0);

Tour nearest_insertion(const MultiGraphInstance& inst_pruned,
                       const Preference& pref);

Tour farthest_insertion(const MultiGraphInstance& inst_pruned,
                        const Preference& pref);

// NN with capacity-triggered depot returns.
RouteSet nearest_neighbor_routes(const MultiGraphInstance& inst_pruned,
                                 const Preference& pref);

// Best-move 2-opt on the full multigraph: every move re-selects slots for
// pairs whose adjacency or direction changed, by lowest linear scalarized
// cost. max_moves = 0 means no limit. Never increases the scalarized cost.
Tour two_opt_multigraph(const MultiGraphInstance& inst, const Tour& tour,
                        const Preference& pref, int max_moves = 0);

// Path variant used per CVRP route (endpoints pinned at the depot).
std::vector<EdgeRef> two_opt_route(const MultiGraphInstance& inst,
                                   const std::vector<EdgeRef>& route,
                                   const Preference& pref, int max_moves = 0);

enum class InnerHeuristic { NN, NI, FI };

struct SweepConfig {
  InnerHeuristic inner = InnerHeuristic::NN;
  bool two_opt = false;
  // sweep all NN start nodes and keep the best scalarized tour
  bool nn_all_starts = false;
  int max_moves = 0;
};

// For each preference: prune, run the inner solver, lift the solution back
// to the multigraph, evaluate the true multi-objective cost and insert it.
ParetoArchive scalarized_sweep(const MultiGraphInstance& inst, ProblemKind kind,
                               const std::vector<Preference>& prefs,
                               const SweepConfig& cfg);

}  // namespace mgroute

#endif
