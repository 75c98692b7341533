#include "mgroute/heur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgroute/problems.hpp"

namespace mgroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kImproveEps = 1e-12;

void require_single_slot(const MultiGraphInstance& inst, const char* who) {
  require(inst.max_parallel() == 1,
          std::string(who) + ": expects a single-slot (pruned) instance");
}

double scal_edge(const MultiGraphInstance& inst, int i, int j,
                 const Preference& pref) {
  return linear_scalarize(inst.pair_slots(i, j)[0], pref);
}

Tour tour_from_order(const std::vector<int>& order) {
  Tour t;
  const int n = static_cast<int>(order.size());
  t.steps.reserve(order.size());
  for (int k = 0; k < n; ++k)
    t.steps.push_back({order[k], order[(k + 1) % n], 0});
  return t;
}

// Per ordered pair: scalarized cost of the cheapest slot and its index.
struct BestSlotTable {
  int n = 0;
  std::vector<double> cost;
  std::vector<int> slot;

  BestSlotTable(const MultiGraphInstance& inst, const Preference& pref)
      : n(inst.n),
        cost(static_cast<std::size_t>(inst.n) * inst.n, kInf),
        slot(static_cast<std::size_t>(inst.n) * inst.n, 0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& slots = inst.pair_slots(i, j);
        double best = kInf;
        int arg = 0;
        for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
          double c = linear_scalarize(slots[s], pref);
          if (c < best) {
            best = c;
            arg = s;
          }
        }
        cost[static_cast<std::size_t>(i) * n + j] = best;
        slot[static_cast<std::size_t>(i) * n + j] = arg;
      }
  }

  double operator()(int i, int j) const {
    return cost[static_cast<std::size_t>(i) * n + j];
  }
  int arg(int i, int j) const {
    return slot[static_cast<std::size_t>(i) * n + j];
  }
};

}  // namespace

Tour nearest_neighbor(const MultiGraphInstance& inst, const Preference& pref,
                      int start) {
  require_single_slot(inst, "nearest_neighbor");
  const int n = inst.n;
  require(start >= 0 && start < n, "nearest_neighbor: start out of range");
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::vector<int> order{start};
  visited[start] = true;
  int cur = start;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_cost = kInf;
    for (int v = 0; v < n; ++v) {
      if (visited[v]) continue;
      double c = scal_edge(inst, cur, v, pref);
      if (c < best_cost) {
        best_cost = c;
        best = v;
      }
    }
    order.push_back(best);
    visited[best] = true;
    cur = best;
  }
  return tour_from_order(order);
}

namespace {

Tour insertion_heuristic(const MultiGraphInstance& inst, const Preference& pref,
                         bool nearest) {
  require_single_slot(inst, nearest ? "nearest_insertion" : "farthest_insertion");
  const int n = inst.n;
  require(n >= 3, "insertion: n must be >= 3");
  auto enclosure = [&](int u, int w) {
    return std::min(scal_edge(inst, u, w, pref), scal_edge(inst, w, u, pref));
  };
  std::vector<bool> in_tour(static_cast<std::size_t>(n), false);
  std::vector<int> cycle{0};
  in_tour[0] = true;
  {
    int pick = -1;
    double pick_cost = nearest ? kInf : -kInf;
    for (int v = 1; v < n; ++v) {
      double c = enclosure(0, v);
      if (nearest ? c < pick_cost : c > pick_cost) {
        pick_cost = c;
        pick = v;
      }
    }
    cycle.push_back(pick);
    in_tour[pick] = true;
  }
  while (static_cast<int>(cycle.size()) < n) {
    // selection: node nearest to / farthest from the partial tour
    int pick = -1;
    double pick_cost = nearest ? kInf : -kInf;
    for (int v = 0; v < n; ++v) {
      if (in_tour[v]) continue;
      double d = kInf;
      for (int w : cycle) d = std::min(d, enclosure(v, w));
      if (nearest ? d < pick_cost : d > pick_cost) {
        pick_cost = d;
        pick = v;
      }
    }
    // position: minimal directed insertion delta
    const int len = static_cast<int>(cycle.size());
    int best_pos = 0;
    double best_delta = kInf;
    for (int p = 0; p < len; ++p) {
      int a = cycle[p];
      int b = cycle[(p + 1) % len];
      double delta = scal_edge(inst, a, pick, pref) +
                     scal_edge(inst, pick, b, pref) -
                     scal_edge(inst, a, b, pref);
      if (delta < best_delta) {
        best_delta = delta;
        best_pos = p;
      }
    }
    cycle.insert(cycle.begin() + best_pos + 1, pick);
    in_tour[pick] = true;
  }
  return tour_from_order(cycle);
}

}  // namespace

Tour nearest_insertion(const MultiGraphInstance& inst, const Preference& pref) {
  return insertion_heuristic(inst, pref, true);
}

Tour farthest_insertion(const MultiGraphInstance& inst, const Preference& pref) {
  return insertion_heuristic(inst, pref, false);
}

RouteSet nearest_neighbor_routes(const MultiGraphInstance& inst,
                                 const Preference& pref) {
  require_single_slot(inst, "nearest_neighbor_routes");
  require(inst.depot && inst.capacity, "nearest_neighbor_routes: needs depot");
  const int n = inst.n;
  const int depot = *inst.depot;
  std::vector<bool> served(static_cast<std::size_t>(n), false);
  served[depot] = true;
  int remaining = n - 1;
  RouteSet rs;
  while (remaining > 0) {
    std::vector<EdgeRef> route;
    int cur = depot;
    int load = *inst.capacity;
    for (;;) {
      int best = -1;
      double best_cost = kInf;
      for (int v = 0; v < n; ++v) {
        if (served[v] || inst.demands[v] > load) continue;
        double c = scal_edge(inst, cur, v, pref);
        if (c < best_cost) {
          best_cost = c;
          best = v;
        }
      }
      if (best < 0) break;
      route.push_back({cur, best, 0});
      served[best] = true;
      load -= inst.demands[best];
      cur = best;
      --remaining;
    }
    route.push_back({cur, depot, 0});
    rs.routes.push_back(std::move(route));
  }
  return rs;
}

Tour two_opt_multigraph(const MultiGraphInstance& inst, const Tour& tour,
                        const Preference& pref, int max_moves) {
  require(validate_tour(inst, tour).empty(), "two_opt_multigraph: invalid tour");
  const int n = inst.n;
  if (n < 4) return tour;
  BestSlotTable best(inst, pref);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<int> slot_of_leg(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    order[k] = tour.steps[k].from;
    slot_of_leg[k] = tour.steps[k].slot;
  }

  // prefix sums over current legs (current slots) and over best-slot
  // reversed legs; rebuilt after every applied move
  std::vector<double> cur_fwd(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> rev_best(static_cast<std::size_t>(n) + 1, 0.0);
  auto rebuild = [&]() {
    for (int k = 0; k < n; ++k) {
      int a = order[k];
      int b = order[(k + 1) % n];
      cur_fwd[k + 1] =
          cur_fwd[k] +
          linear_scalarize(inst.pair_slots(a, b)[slot_of_leg[k]], pref);
      rev_best[k + 1] = rev_best[k] + best(b, a);
    }
  };
  rebuild();

  int moves = 0;
  for (;;) {
    // best 2-opt move: reverse order[a+1 .. b]
    int move_a = -1, move_b = -1;
    double move_delta = -kImproveEps;
    for (int a = 0; a + 2 < n; ++a) {
      for (int b = a + 2; b < n; ++b) {
        if (a == 0 && b == n - 1) continue;  // degenerate full orientation flip
        int va = order[a], va1 = order[a + 1];
        int vb = order[b], vb1 = order[(b + 1) % n];
        double removed = (cur_fwd[b + 1] - cur_fwd[a]);
        double added = best(va, vb) + (rev_best[b] - rev_best[a + 1]) +
                       best(va1, vb1);
        double delta = added - removed;
        if (delta < move_delta) {
          move_delta = delta;
          move_a = a;
          move_b = b;
        }
      }
    }
    if (move_a < 0) break;
    // apply: reverse the segment; changed legs pick up best slots
    std::reverse(order.begin() + move_a + 1, order.begin() + move_b + 1);
    for (int k = move_a; k <= move_b; ++k) {
      int a = order[k];
      int b = order[(k + 1) % n];
      slot_of_leg[k] = best.arg(a, b);
    }
    rebuild();
    ++moves;
    if (max_moves > 0 && moves >= max_moves) break;
  }

  Tour out;
  out.steps.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    out.steps.push_back({order[k], order[(k + 1) % n], slot_of_leg[k]});
  return out;
}

std::vector<EdgeRef> two_opt_route(const MultiGraphInstance& inst,
                                   const std::vector<EdgeRef>& route,
                                   const Preference& pref, int max_moves) {
  const int legs = static_cast<int>(route.size());
  if (legs < 3) return route;
  BestSlotTable best(inst, pref);
  std::vector<int> nodes;  // depot, customers..., depot
  nodes.reserve(route.size() + 1);
  for (const EdgeRef& e : route) nodes.push_back(e.from);
  nodes.push_back(route.back().to);
  std::vector<int> slot(static_cast<std::size_t>(legs));
  for (int k = 0; k < legs; ++k) slot[k] = route[k].slot;

  auto leg_cost = [&](int k) {
    return linear_scalarize(inst.pair_slots(nodes[k], nodes[k + 1])[slot[k]],
                            pref);
  };
  int moves = 0;
  for (;;) {
    int move_a = -1, move_b = -1;
    double move_delta = -kImproveEps;
    // reverse nodes[a+1 .. b] with endpoints fixed
    for (int a = 0; a + 2 < legs; ++a) {
      for (int b = a + 2; b < legs; ++b) {
        double removed = 0.0;
        for (int k = a; k <= b; ++k) removed += leg_cost(k);
        double added = best(nodes[a], nodes[b]) + best(nodes[a + 1], nodes[b + 1]);
        for (int k = a + 1; k < b; ++k) added += best(nodes[k + 1], nodes[k]);
        double delta = added - removed;
        if (delta < move_delta) {
          move_delta = delta;
          move_a = a;
          move_b = b;
        }
      }
    }
    if (move_a < 0) break;
    std::reverse(nodes.begin() + move_a + 1, nodes.begin() + move_b + 1);
    for (int k = move_a; k <= move_b; ++k)
      slot[k] = best.arg(nodes[k], nodes[k + 1]);
    ++moves;
    if (max_moves > 0 && moves >= max_moves) break;
  }
  std::vector<EdgeRef> out;
  out.reserve(static_cast<std::size_t>(legs));
  for (int k = 0; k < legs; ++k) out.push_back({nodes[k], nodes[k + 1], slot[k]});
  return out;
}

ParetoArchive scalarized_sweep(const MultiGraphInstance& inst, ProblemKind kind,
                               const std::vector<Preference>& prefs,
                               const SweepConfig& cfg) {
  require(!prefs.empty(), "scalarized_sweep: prefs must be non-empty");
  ParetoArchive archive;
  const bool cvrp = kind == ProblemKind::MOCVRP || kind == ProblemKind::MGMOCVRP;
  for (const Preference& pref : prefs) {
    // objective preferences match edge features except for MOCVRP, whose
    // single distance feature is scalarized with weight 1
    Preference edge_pref =
        pref.dim() == static_cast<std::size_t>(inst.m)
            ? pref
            : Preference(std::vector<double>(static_cast<std::size_t>(inst.m),
                                             1.0 / inst.m));
    PrunedInstance pruned = prune_linear(inst, edge_pref);
    if (cvrp) {
      RouteSet routes = nearest_neighbor_routes(pruned.graph, edge_pref);
      RouteSet lifted = pruned.reconstruct(routes);
      if (cfg.two_opt)
        for (auto& r : lifted.routes)
          r = two_opt_route(inst, r, edge_pref, cfg.max_moves);
      archive.insert(eval_cvrp(inst, lifted), lifted);
      continue;
    }
    const int start = kind == ProblemKind::MGMOTSPTW ? inst.depot.value_or(0) : 0;
    Tour best_tour;
    double best_scal = kInf;
    auto consider = [&](const Tour& pruned_tour) {
      Tour lifted = pruned.reconstruct(pruned_tour);
      if (cfg.two_opt)
        lifted = two_opt_multigraph(inst, lifted, pref, cfg.max_moves);
      double s = linear_scalarize(eval_tsp(inst, lifted), pref);
      if (s < best_scal) {
        best_scal = s;
        best_tour = lifted;
      }
    };
    switch (cfg.inner) {
      case InnerHeuristic::NN:
        if (cfg.nn_all_starts && kind != ProblemKind::MGMOTSPTW) {
          for (int v = 0; v < inst.n; ++v)
            consider(nearest_neighbor(pruned.graph, pref, v));
        } else {
          consider(nearest_neighbor(pruned.graph, pref, start));
        }
        break;
      case InnerHeuristic::NI:
        consider(nearest_insertion(pruned.graph, pref));
        break;
      case InnerHeuristic::FI:
        consider(farthest_insertion(pruned.graph, pref));
        break;
    }
    if (kind == ProblemKind::MGMOTSPTW) {
      // rotate so the tour starts at the depot, then use the true objective
      Tour rotated;
      const int n = inst.n;
      int at = 0;
      while (best_tour.steps[at].from != inst.depot.value_or(0)) ++at;
      for (int k = 0; k < n; ++k)
        rotated.steps.push_back(best_tour.steps[(at + k) % n]);
      archive.insert(eval_tsptw(inst, rotated), rotated);
    } else {
      archive.insert(eval_tsp(inst, best_tour), best_tour);
    }
  }
  return archive;
}

}  // namespace mgroute
