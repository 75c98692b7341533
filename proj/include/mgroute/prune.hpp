#ifndef MGROUTE_PRUNE_HPP
#define MGROUTE_PRUNE_HPP

#include "mgroute/core.hpp"
#include "mgroute/scalarize.hpp"

namespace mgroute {

// Pruned view of a multigraph: one surviving slot per ordered pair plus the
// map back to the original slot indices.
struct PrunedInstance {
  MultiGraphInstance graph;     // exactly one slot per pair
  std::vector<int> kept_slot;   // [i*n + j] -> original slot index

  int slot_of(int i, int j) const {
    return kept_slot[static_cast<std::size_t>(i) * graph.n + j];
  }
  // Lifts a tour on the pruned graph back to original slot indices.
  Tour reconstruct(const Tour& pruned_tour) const;
  RouteSet reconstruct(const RouteSet& pruned_routes) const;
};

// Keeps, per ordered pair, the slot minimizing the linear scalarized cost;
// ties broken by lowest slot index.
PrunedInstance prune_linear(const MultiGraphInstance& inst, const Preference& pref);

// Identical mechanics under a separate name: exact for linear MOTSP-family
// objectives, a heuristic for time-window instances.
PrunedInstance prune_simple_heuristic(const MultiGraphInstance& inst,
                                      const Preference& pref);

// Brute-force check that pruning preserves the optimal linearly scalarized
// tour cost (within 1e-9). Subject to the exhaustive enumeration caps.
bool check_prop1(const MultiGraphInstance& inst, const Preference& pref);

}  // namespace mgroute

#endif
