#include "mgroute/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mgroute {

namespace {

std::string violation_report(const std::vector<TourViolation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += v.category + ": " + v.detail;
  }
  return s;
}

void require_valid_tour(const MultiGraphInstance& inst, const Tour& tour,
                        const char* who) {
  auto vs = validate_tour(inst, tour);
  require(vs.empty(), std::string(who) + ": invalid tour (" +
                          violation_report(vs) + ")");
}

}  // namespace

CostVector eval_tsp(const MultiGraphInstance& inst, const Tour& tour) {
  require_valid_tour(inst, tour, "eval_tsp");
  CostVector total(static_cast<std::size_t>(inst.m), 0.0);
  for (const EdgeRef& e : tour.steps) {
    const CostVector& c = inst.edge_cost(e);
    for (int k = 0; k < inst.m; ++k) total[k] += c[k];
  }
  return total;
}

CostVector eval_cvrp(const MultiGraphInstance& inst, const RouteSet& routes) {
  auto vs = validate_routes(inst, routes);
  require(vs.empty(), "eval_cvrp: invalid routes (" + violation_report(vs) + ")");
  if (inst.m == 1) {
    double total = 0.0;
    double makespan = 0.0;
    for (const auto& route : routes.routes) {
      double len = 0.0;
      for (const EdgeRef& e : route) len += inst.edge_cost(e)[0];
      total += len;
      makespan = std::max(makespan, len);
    }
    return {total, makespan};
  }
  CostVector total(static_cast<std::size_t>(inst.m), 0.0);
  for (const auto& route : routes.routes)
    for (const EdgeRef& e : route) {
      const CostVector& c = inst.edge_cost(e);
      for (int k = 0; k < inst.m; ++k) total[k] += c[k];
    }
  return total;
}

CostVector eval_tsptw(const MultiGraphInstance& inst, const Tour& tour,
                      bool early_is_violation) {
  require_valid_tour(inst, tour, "eval_tsptw");
  require(inst.has_windows, "eval_tsptw: instance has no time windows");
  const int depot = inst.depot.value_or(0);
  require(tour.steps.front().from == depot, "eval_tsptw: tour must start at depot");
  double now = 0.0;
  double dist = 0.0;
  int violations = 0;
  for (const EdgeRef& e : tour.steps) {
    const CostVector& c = inst.edge_cost(e);
    now += c[0];
    dist += c[1];
    if (e.to == depot) continue;
    const TimeWindow& w = inst.windows[e.to];
    if (now > w.end || (early_is_violation && now < w.start)) ++violations;
  }
  return {static_cast<double>(violations), dist};
}

CostVector evaluate(const MultiGraphInstance& inst, ProblemKind kind,
                    const Solution& sol) {
  switch (kind) {
    case ProblemKind::MOTSP:
    case ProblemKind::MGMOTSP:
      return eval_tsp(inst, std::get<Tour>(sol));
    case ProblemKind::MOCVRP:
    case ProblemKind::MGMOCVRP:
      return eval_cvrp(inst, std::get<RouteSet>(sol));
    case ProblemKind::MGMOTSPTW:
      return eval_tsptw(inst, std::get<Tour>(sol));
  }
  throw ContractError("evaluate: unknown kind");
}

namespace {

bool is_tsp_family(ProblemKind kind) {
  return kind == ProblemKind::MOTSP || kind == ProblemKind::MGMOTSP ||
         kind == ProblemKind::MGMOTSPTW;
}

// DFS over slot assignments for a fixed node order; inserts every leaf.
void enumerate_slots_tsp(const MultiGraphInstance& inst, ProblemKind kind,
                         const std::vector<int>& order, std::size_t leg,
                         std::vector<EdgeRef>& steps, ParetoArchive& archive) {
  const int n = inst.n;
  if (leg == order.size()) {
    Tour tour{steps};
    CostVector cost = kind == ProblemKind::MGMOTSPTW ? eval_tsptw(inst, tour)
                                                     : eval_tsp(inst, tour);
    archive.insert(std::move(cost), std::move(tour));
    return;
  }
  int from = order[leg];
  int to = order[(leg + 1) % n];
  int count = inst.parallel_count(from, to);
  for (int s = 0; s < count; ++s) {
    steps.push_back({from, to, s});
    enumerate_slots_tsp(inst, kind, order, leg + 1, steps, archive);
    steps.pop_back();
  }
}

void enumerate_slots_route(const MultiGraphInstance& inst,
                           const std::vector<std::vector<int>>& node_routes,
                           std::size_t r, std::size_t leg, RouteSet& rs,
                           ParetoArchive& archive) {
  if (r == node_routes.size()) {
    archive.insert(eval_cvrp(inst, rs), rs);
    return;
  }
  const auto& nodes = node_routes[r];  // depot ... depot
  if (leg + 1 == nodes.size()) {
    enumerate_slots_route(inst, node_routes, r + 1, 0, rs, archive);
    return;
  }
  int from = nodes[leg];
  int to = nodes[leg + 1];
  int count = inst.parallel_count(from, to);
  for (int s = 0; s < count; ++s) {
    rs.routes[r].push_back({from, to, s});
    enumerate_slots_route(inst, node_routes, r, leg + 1, rs, archive);
    rs.routes[r].pop_back();
  }
}

}  // namespace

ParetoArchive exhaustive_pareto(const MultiGraphInstance& inst,
                                ProblemKind kind) {
  const int n = inst.n;
  ParetoArchive archive;  // dimension pinned by the first insert
  if (is_tsp_family(kind)) {
    require(n <= kExhaustiveTspCap,
            "exhaustive_pareto: n exceeds TSP cap " +
                std::to_string(kExhaustiveTspCap));
    // free-start cycles: fixing node 0 first enumerates each directed
    // Hamiltonian cycle exactly once (MGMOTSPTW fixes the depot anyway)
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<EdgeRef> steps;
    steps.reserve(static_cast<std::size_t>(n));
    do {
      enumerate_slots_tsp(inst, kind, order, 0, steps, archive);
    } while (std::next_permutation(order.begin() + 1, order.end()));
    return archive;
  }

  require(inst.depot && inst.capacity, "exhaustive_pareto: CVRP needs depot");
  require(n <= kExhaustiveCvrpCap,
          "exhaustive_pareto: n exceeds CVRP cap " +
              std::to_string(kExhaustiveCvrpCap));
  const int depot = *inst.depot;
  std::vector<int> customers;
  for (int v = 0; v < n; ++v)
    if (v != depot) customers.push_back(v);
  std::sort(customers.begin(), customers.end());
  const int k = static_cast<int>(customers.size());
  do {
    // split mask bit t set = route boundary after position t
    for (int mask = 0; mask < (1 << (k - 1)); ++mask) {
      std::vector<std::vector<int>> node_routes;
      std::vector<int> cur{depot};
      bool feasible = true;
      int load = 0;
      for (int t = 0; t < k; ++t) {
        load += inst.demands[customers[t]];
        if (load > *inst.capacity) {
          feasible = false;
          break;
        }
        cur.push_back(customers[t]);
        bool boundary = t + 1 == k || (mask >> t) & 1;
        if (boundary) {
          cur.push_back(depot);
          node_routes.push_back(std::move(cur));
          cur = {depot};
          load = 0;
        }
      }
      if (!feasible) continue;
      // canonical: routes ordered by first customer, so each set of routes
      // is enumerated exactly once
      bool canonical = true;
      for (std::size_t r = 1; r < node_routes.size(); ++r)
        if (node_routes[r][1] < node_routes[r - 1][1]) canonical = false;
      if (!canonical) continue;
      RouteSet rs;
      rs.routes.resize(node_routes.size());
      enumerate_slots_route(inst, node_routes, 0, 0, rs, archive);
    }
  } while (std::next_permutation(customers.begin(), customers.end()));
  return archive;
}

double exhaustive_min_scalar_tour(const MultiGraphInstance& inst,
                                  const std::vector<double>& weights) {
  const int n = inst.n;
  require(n <= kExhaustiveTspCap, "exhaustive_min_scalar_tour: n exceeds cap " +
                                      std::to_string(kExhaustiveTspCap));
  require(static_cast<int>(weights.size()) == inst.m,
          "exhaustive_min_scalar_tour: weight dimension mismatch");
  // per-slot scalar costs, computed once
  std::vector<std::vector<double>> scal(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      auto& out = scal[static_cast<std::size_t>(i) * n + j];
      out.reserve(slots.size());
      for (const auto& c : slots) {
        double s = 0.0;
        for (int m = 0; m < inst.m; ++m) s += weights[m] * c[m];
        out.push_back(s);
      }
    }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // DFS over slot combinations; partial sums are monotone so the best-so-far
  // cutoff keeps the enumeration exact
  auto dfs = [&](auto&& self, std::size_t leg, double acc) -> void {
    if (acc >= best) return;
    if (leg == order.size()) {
      best = acc;
      return;
    }
    const auto& costs =
        scal[static_cast<std::size_t>(order[leg]) * n + order[(leg + 1) % n]];
    for (double c : costs) self(self, leg + 1, acc + c);
  };
  do {
    dfs(dfs, 0, 0.0);
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return best;
}

}  // namespace mgroute
