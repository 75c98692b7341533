#include "mgroute/prune.hpp"

#include <cmath>

#include "mgroute/problems.hpp"

namespace mgroute {

Tour PrunedInstance::reconstruct(const Tour& pruned_tour) const {
  Tour out = pruned_tour;
  for (EdgeRef& e : out.steps) e.slot = slot_of(e.from, e.to);
  return out;
}

RouteSet PrunedInstance::reconstruct(const RouteSet& pruned_routes) const {
  RouteSet out = pruned_routes;
  for (auto& route : out.routes)
    for (EdgeRef& e : route) e.slot = slot_of(e.from, e.to);
  return out;
}

PrunedInstance prune_linear(const MultiGraphInstance& inst,
                            const Preference& pref) {
  require(pref.dim() == static_cast<std::size_t>(inst.m),
          "prune_linear: preference dimension mismatch");
  PrunedInstance out;
  out.graph = MultiGraphInstance::empty(inst.n, inst.m);
  out.graph.demands = inst.demands;
  out.graph.windows = inst.windows;
  out.graph.has_windows = inst.has_windows;
  out.graph.depot = inst.depot;
  out.graph.capacity = inst.capacity;
  out.kept_slot.assign(static_cast<std::size_t>(inst.n) * inst.n, 0);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      int best = 0;
      double best_cost = linear_scalarize(slots[0], pref);
      for (int s = 1; s < static_cast<int>(slots.size()); ++s) {
        double c = linear_scalarize(slots[s], pref);
        if (c < best_cost) {
          best_cost = c;
          best = s;
        }
      }
      out.kept_slot[static_cast<std::size_t>(i) * inst.n + j] = best;
      out.graph.pair_slots(i, j).push_back(slots[best]);
    }
  }
  return out;
}

PrunedInstance prune_simple_heuristic(const MultiGraphInstance& inst,
                                      const Preference& pref) {
  return prune_linear(inst, pref);
}

bool check_prop1(const MultiGraphInstance& inst, const Preference& pref) {
  PrunedInstance pruned = prune_linear(inst, pref);
  double full = exhaustive_min_scalar_tour(inst, pref.weights);
  double reduced = exhaustive_min_scalar_tour(pruned.graph, pref.weights);
  return std::fabs(full - reduced) < 1e-9;
}

}  // namespace mgroute
