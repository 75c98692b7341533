#ifndef MGROUTE_PROBLEMS_HPP
#define MGROUTE_PROBLEMS_HPP

#include "mgroute/core.hpp"
#include "mgroute/gen.hpp"

namespace mgroute {

// Componentwise sum of traversed edge costs. Covers MOTSP and MGMOTSP.
CostVector eval_tsp(const MultiGraphInstance& inst, const Tour& tour);

// m = 1 edge feature: (total distance, makespan). m = 2: componentwise sum.
CostVector eval_cvrp(const MultiGraphInstance& inst, const RouteSet& routes);

// Forward time simulation with zero service and zero waiting. Objective 1 is
// the number of nodes whose arrival time falls outside [start, end]; by
// default arriving before the window opens counts as a violation since the
// vehicle never waits (early_is_violation toggles the alternative reading).
// Objective 2 sums the distance feature.
CostVector eval_tsptw(const MultiGraphInstance& inst, const Tour& tour,
                      bool early_is_violation = true);

CostVector evaluate(const MultiGraphInstance& inst, ProblemKind kind,
                    const Solution& sol);

// Hard enumeration caps: factorial x slot-product blowup beyond these.
inline constexpr int kExhaustiveTspCap = 9;
inline constexpr int kExhaustiveCvrpCap = 7;

// Enumerates every feasible solution (all node orders x slot assignments,
// plus all capacity-feasible route splits for CVRP) and returns the exact
// Pareto archive.
ParetoArchive exhaustive_pareto(const MultiGraphInstance& inst, ProblemKind kind);

// Enumerates all tours and reports the minimum linearly scalarized cost.
// Used by the Proposition 1 checker; honors the same caps.
double exhaustive_min_scalar_tour(const MultiGraphInstance& inst,
                                  const std::vector<double>& weights);

}  // namespace mgroute

#endif
