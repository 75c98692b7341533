#include "mgroute/moea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgroute/heur.hpp"
#include "mgroute/metrics.hpp"
#include "mgroute/problems.hpp"
#include "mgroute/prune.hpp"

namespace mgroute {

namespace {
constexpr double kInfCost = std::numeric_limits<double>::infinity();
}

Chromosome encode(const Tour& tour) {
  Chromosome c;
  c.genes.reserve(tour.steps.size());
  for (const EdgeRef& e : tour.steps) {
    require(e.slot < 99, "encode: slot index exceeds gene base");
    c.genes.push_back(e.from * 100 + e.slot + 1);
  }
  return c;
}

Tour decode(const MultiGraphInstance& inst, const Chromosome& chrom) {
  const int n = inst.n;
  require(static_cast<int>(chrom.genes.size()) == n,
          "decode: gene count != node count");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (std::size_t k = 0; k < chrom.genes.size(); ++k) {
    int node = chrom.node(k);
    require(node >= 0 && node < n, "decode: node part out of range");
    require(!seen[node], "decode: repeated node part");
    seen[node] = true;
  }
  Tour t;
  t.steps.reserve(chrom.genes.size());
  for (std::size_t k = 0; k < chrom.genes.size(); ++k) {
    int from = chrom.node(k);
    int to = chrom.node((k + 1) % chrom.genes.size());
    int slot = chrom.slot(k);
    require(slot >= 0 && slot < inst.parallel_count(from, to),
            "decode: slot part out of range toward successor");
    t.steps.push_back({from, to, slot});
  }
  return t;
}

Chromosome random_chromosome(const MultiGraphInstance& inst, Rng& rng) {
  const int n = inst.n;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  Chromosome c;
  c.genes.reserve(order.size());
  for (int k = 0; k < n; ++k) {
    int from = order[k];
    int to = order[(k + 1) % n];
    int slot = static_cast<int>(rng.uniform_int(
        static_cast<std::uint64_t>(inst.parallel_count(from, to))));
    c.genes.push_back(from * 100 + slot + 1);
  }
  return c;
}

Chromosome mutate(const MultiGraphInstance& inst, const Chromosome& chrom,
                  Rng& rng) {
  const int n = static_cast<int>(chrom.genes.size());
  Chromosome out = chrom;
  if (rng.bernoulli(0.5)) {
    // re-sample one gene's slot toward its successor
    int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    int from = out.node(k);
    int to = out.node((k + 1) % n);
    int count = inst.parallel_count(from, to);
    int slot = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(count)));
    out.genes[k] = from * 100 + slot + 1;
  } else {
    // reverse a contiguous segment; slots travel with their nodes and are
    // clamped to the valid range toward the new successor
    int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    if (i > j) std::swap(i, j);
    std::reverse(out.genes.begin() + i, out.genes.begin() + j + 1);
    for (int k = 0; k < n; ++k) {
      int from = out.node(k);
      int to = out.node((k + 1) % n);
      int count = inst.parallel_count(from, to);
      if (out.slot(k) >= count) out.genes[k] = from * 100 + count;
    }
  }
  return out;
}

Chromosome edge_recombination(const MultiGraphInstance& inst,
                              const Chromosome& parent_a,
                              const Chromosome& parent_b,
                              const Preference& pref, Rng& rng) {
  const int n = static_cast<int>(parent_a.genes.size());
  require(static_cast<int>(parent_b.genes.size()) == n,
          "edge_recombination: parent size mismatch");

  // undirected adjacency union of both parents' cycles
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  auto add_cycle = [&](const Chromosome& p) {
    for (int k = 0; k < n; ++k) {
      int u = p.node(k);
      int v = p.node((k + 1) % n);
      auto link = [&](int a, int b) {
        auto& lst = adj[a];
        if (std::find(lst.begin(), lst.end(), b) == lst.end()) lst.push_back(b);
      };
      link(u, v);
      link(v, u);
    }
  };
  add_cycle(parent_a);
  add_cycle(parent_b);
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());

  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  int cur = parent_a.node(0);
  order.push_back(cur);
  used[cur] = true;
  auto drop = [&](int v) {
    for (auto& lst : adj) std::erase(lst, v);
  };
  drop(cur);
  while (static_cast<int>(order.size()) < n) {
    int next = -1;
    if (!adj[cur].empty()) {
      std::size_t fewest = std::numeric_limits<std::size_t>::max();
      std::vector<int> tied;
      for (int v : adj[cur]) {
        if (adj[v].size() < fewest) {
          fewest = adj[v].size();
          tied = {v};
        } else if (adj[v].size() == fewest) {
          tied.push_back(v);
        }
      }
      next = tied[rng.uniform_int(tied.size())];
    } else {
      std::vector<int> rest;
      for (int v = 0; v < n; ++v)
        if (!used[v]) rest.push_back(v);
      next = rest[rng.uniform_int(rest.size())];
    }
    order.push_back(next);
    used[next] = true;
    drop(next);
    cur = next;
  }

  // slot inheritance: parent traversing the same directed pair wins (a
  // before b), otherwise the linear-best slot under pref
  auto parent_slot = [&](const Chromosome& p, int u, int v) -> int {
    for (int k = 0; k < n; ++k)
      if (p.node(k) == u && p.node((k + 1) % n) == v) return p.slot(k);
    return -1;
  };
  Chromosome child;
  child.genes.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    int u = order[k];
    int v = order[(k + 1) % n];
    int slot = parent_slot(parent_a, u, v);
    if (slot < 0) slot = parent_slot(parent_b, u, v);
    if (slot < 0) {
      const auto& slots = inst.pair_slots(u, v);
      slot = 0;
      double best = linear_scalarize(slots[0], pref);
      for (int s = 1; s < static_cast<int>(slots.size()); ++s) {
        double c = linear_scalarize(slots[s], pref);
        if (c < best) {
          best = c;
          slot = s;
        }
      }
    }
    child.genes.push_back(u * 100 + slot + 1);
  }
  return child;
}

std::vector<Preference> lacomme_weights(const std::vector<CostVector>& pop_costs) {
  require(pop_costs.size() >= 2, "lacomme_weights: population must be >= 2");
  for (const auto& c : pop_costs)
    require(c.size() == 2, "lacomme_weights: m must be 2");
  double f1min = kInfCost, f1max = -kInfCost, f2min = kInfCost, f2max = -kInfCost;
  for (const auto& c : pop_costs) {
    f1min = std::min(f1min, c[0]);
    f1max = std::max(f1max, c[0]);
    f2min = std::min(f2min, c[1]);
    f2max = std::max(f2max, c[1]);
  }
  std::vector<Preference> out;
  out.reserve(pop_costs.size());
  for (const auto& c : pop_costs) {
    double w1 = f1max > f1min ? (c[0] - f1min) / (f1max - f1min) : 0.0;
    double w2 = f2max > f2min ? (c[1] - f2min) / (f2max - f2min) : 0.0;
    double sum = w1 + w2;
    if (sum <= 0.0) {
      out.emplace_back(std::vector<double>{0.5, 0.5});
    } else {
      out.emplace_back(std::vector<double>{w1 / sum, 1.0 - w1 / sum});
    }
  }
  return out;
}

std::vector<int> fast_nondominated_sort(const std::vector<CostVector>& costs) {
  const int n = static_cast<int>(costs.size());
  std::vector<int> front_of(static_cast<std::size_t>(n), -1);
  std::vector<int> dominated_count(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> dominates_list(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(costs[i], costs[j]))
        dominates_list[i].push_back(j);
      else if (dominates(costs[j], costs[i]))
        ++dominated_count[i];
    }
  std::vector<int> current;
  for (int i = 0; i < n; ++i)
    if (dominated_count[i] == 0) {
      front_of[i] = 0;
      current.push_back(i);
    }
  int front = 0;
  while (!current.empty()) {
    std::vector<int> next;
    for (int i : current)
      for (int j : dominates_list[i])
        if (--dominated_count[j] == 0) {
          front_of[j] = front + 1;
          next.push_back(j);
        }
    ++front;
    current = std::move(next);
  }
  return front_of;
}

std::vector<double> crowding_distance(const std::vector<CostVector>& costs,
                                      const std::vector<int>& front_of,
                                      int front) {
  const int n = static_cast<int>(costs.size());
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  std::vector<int> members;
  for (int i = 0; i < n; ++i)
    if (front_of[i] == front) members.push_back(i);
  if (members.empty()) return dist;
  const int m = static_cast<int>(costs[members[0]].size());
  for (int k = 0; k < m; ++k) {
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      return costs[a][k] != costs[b][k] ? costs[a][k] < costs[b][k] : a < b;
    });
    double lo = costs[members.front()][k];
    double hi = costs[members.back()][k];
    dist[members.front()] = kInfCost;
    dist[members.back()] = kInfCost;
    if (hi <= lo) continue;
    for (std::size_t t = 1; t + 1 < members.size(); ++t)
      dist[members[t]] +=
          (costs[members[t + 1]][k] - costs[members[t - 1]][k]) / (hi - lo);
  }
  return dist;
}

void MoeaConfig::validate() const {
  require(population >= 4 && population % 2 == 0,
          "MoeaConfig: population must be >= 4 and even");
  require(generations >= 0, "MoeaConfig: generations must be >= 0");
  require(mutation_rate >= 0.0 && mutation_rate <= 1.0 &&
              crossover_rate >= 0.0 && crossover_rate <= 1.0,
          "MoeaConfig: rates must lie in [0,1]");
}

namespace {

bool cvrp_kind(ProblemKind kind) {
  return kind == ProblemKind::MOCVRP || kind == ProblemKind::MGMOCVRP;
}

// objective weights act on edge features only when dimensions agree
Preference to_edge_pref(const MultiGraphInstance& inst, const Preference& w) {
  if (w.dim() == static_cast<std::size_t>(inst.m)) return w;
  return Preference(
      std::vector<double>(static_cast<std::size_t>(inst.m), 1.0 / inst.m));
}

int best_slot_equal_weights(const MultiGraphInstance& inst, int u, int v) {
  const auto& slots = inst.pair_slots(u, v);
  int arg = 0;
  double best = kInfCost;
  for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
    double c = 0.0;
    for (double x : slots[s]) c += x;
    if (c < best) {
      best = c;
      arg = s;
    }
  }
  return arg;
}

}  // namespace

RouteSet decode_routes(const MultiGraphInstance& inst, const Chromosome& chrom) {
  require(inst.depot && inst.capacity, "decode_routes: instance has no depot");
  Tour giant = decode(inst, chrom);
  const int n = inst.n;
  const int depot = *inst.depot;
  int at = 0;
  while (giant.steps[at].from != depot) ++at;

  RouteSet rs;
  std::vector<EdgeRef> route;
  int cur = depot;
  int load = *inst.capacity;
  for (int k = 1; k < n; ++k) {
    const EdgeRef& leg = giant.steps[(at + k - 1) % n];
    int v = leg.to;
    if (inst.demands[v] > load) {
      route.push_back({cur, depot, best_slot_equal_weights(inst, cur, depot)});
      rs.routes.push_back(std::move(route));
      route.clear();
      cur = depot;
      load = *inst.capacity;
    }
    int slot = leg.from == cur ? leg.slot : best_slot_equal_weights(inst, cur, v);
    route.push_back({cur, v, slot});
    load -= inst.demands[v];
    cur = v;
  }
  route.push_back({cur, depot, best_slot_equal_weights(inst, cur, depot)});
  rs.routes.push_back(std::move(route));
  return rs;
}

namespace {

struct Individual {
  Chromosome chrom;
  CostVector cost;
};

}  // namespace

ParetoArchive nsga2_run(const MultiGraphInstance& inst, ProblemKind kind,
                        const MoeaConfig& cfg, MoeaStats* stats) {
  cfg.validate();
  Rng rng(cfg.seed);
  ParetoArchive archive;

  const bool cvrp = cvrp_kind(kind);
  const int depot = inst.depot.value_or(0);

  auto evaluate_chrom = [&](const Chromosome& c) -> CostVector {
    if (cvrp) {
      RouteSet rs = decode_routes(inst, c);
      CostVector cost = eval_cvrp(inst, rs);
      archive.insert(cost, std::move(rs));
      return cost;
    }
    Tour t = decode(inst, c);
    if (kind == ProblemKind::MGMOTSPTW) {
      Tour rotated;
      int at = 0;
      while (t.steps[at].from != depot) ++at;
      for (int k = 0; k < inst.n; ++k)
        rotated.steps.push_back(t.steps[(at + k) % inst.n]);
      CostVector cost = eval_tsptw(inst, rotated);
      archive.insert(cost, std::move(rotated));
      return cost;
    }
    CostVector cost = eval_tsp(inst, t);
    archive.insert(cost, std::move(t));
    return cost;
  };

  // improvement operator: 2-opt under the individual's weights
  auto improve = [&](Individual& ind, const Preference& w) {
    if (cfg.local_search_moves <= 0) return;
    if (cvrp) {
      RouteSet rs = decode_routes(inst, ind.chrom);
      for (auto& r : rs.routes) {
        Preference edge_w = to_edge_pref(inst, w);
        r = two_opt_route(inst, r, edge_w, cfg.local_search_moves);
      }
      CostVector cost = eval_cvrp(inst, rs);
      archive.insert(cost, rs);
      // rebuild the giant-tour chromosome from the improved routes
      std::vector<int> order{depot};
      for (const auto& r : rs.routes)
        for (const EdgeRef& e : r)
          if (e.to != depot) order.push_back(e.to);
      Chromosome c;
      for (int k = 0; k < inst.n; ++k) {
        int u = order[k];
        int v = order[(k + 1) % inst.n];
        c.genes.push_back(u * 100 + best_slot_equal_weights(inst, u, v) + 1);
      }
      ind.chrom = std::move(c);
      ind.cost = std::move(cost);
      return;
    }
    Tour t = decode(inst, ind.chrom);
    t = two_opt_multigraph(inst, t, to_edge_pref(inst, w), cfg.local_search_moves);
    ind.chrom = encode(t);
    ind.cost = evaluate_chrom(ind.chrom);
  };

  // initial population: NN seeds over sampled preferences plus random tours
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population));
  const int seeds = std::min(cfg.population / 2, 5);
  for (int s = 0; s < seeds; ++s) {
    // seed preferences act on edge features; MOCVRP has a single feature
    Preference pref = inst.m >= 2 ? sample_preference(inst.m, rng)
                                  : Preference({1.0});
    PrunedInstance pruned = prune_linear(inst, pref);
    Chromosome c;
    if (cvrp) {
      RouteSet rs = pruned.reconstruct(nearest_neighbor_routes(pruned.graph, pref));
      std::vector<int> order{depot};
      for (const auto& r : rs.routes)
        for (const EdgeRef& e : r)
          if (e.to != depot) order.push_back(e.to);
      for (int k = 0; k < inst.n; ++k) {
        int u = order[k];
        int v = order[(k + 1) % inst.n];
        c.genes.push_back(u * 100 + pruned.slot_of(u, v) + 1);
      }
    } else {
      int start = kind == ProblemKind::MGMOTSPTW ? depot : 0;
      c = encode(pruned.reconstruct(nearest_neighbor(pruned.graph, pref, start)));
    }
    pop.push_back({c, evaluate_chrom(c)});
  }
  while (static_cast<int>(pop.size()) < cfg.population) {
    Chromosome c = random_chromosome(inst, rng);
    pop.push_back({c, evaluate_chrom(c)});
  }

  auto record_hv = [&]() {
    if (!stats || cfg.hv_ref.empty()) return;
    stats->archive_hv.push_back(hypervolume(archive.costs(), cfg.hv_ref).value);
  };
  record_hv();

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<CostVector> costs;
    costs.reserve(pop.size());
    for (const auto& ind : pop) costs.push_back(ind.cost);
    std::vector<int> front_of = fast_nondominated_sort(costs);
    std::vector<double> crowd(costs.size(), 0.0);
    int max_front = *std::max_element(front_of.begin(), front_of.end());
    for (int f = 0; f <= max_front; ++f) {
      auto d = crowding_distance(costs, front_of, f);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (front_of[i] == f) crowd[i] = d[i];
    }
    std::vector<Preference> weights = lacomme_weights(costs);

    auto tournament = [&]() -> int {
      int a = static_cast<int>(rng.uniform_int(pop.size()));
      int b = static_cast<int>(rng.uniform_int(pop.size()));
      if (front_of[a] != front_of[b]) return front_of[a] < front_of[b] ? a : b;
      if (crowd[a] != crowd[b]) return crowd[a] > crowd[b] ? a : b;
      return std::min(a, b);
    };

    std::vector<Individual> offspring;
    offspring.reserve(pop.size());
    for (int i = 0; i < cfg.population; ++i) {
      int pa = tournament();
      int pb = tournament();
      Chromosome child;
      if (rng.bernoulli(cfg.crossover_rate)) {
        child = edge_recombination(inst, pop[pa].chrom, pop[pb].chrom,
                                   to_edge_pref(inst, weights[pa]), rng);
      } else {
        child = pop[pa].chrom;
      }
      if (rng.bernoulli(cfg.mutation_rate)) child = mutate(inst, child, rng);
      Individual ind{child, evaluate_chrom(child)};
      // improvement weights from the child's own objectives vs the
      // population ranges
      std::vector<CostVector> with_child = costs;
      with_child.push_back(ind.cost);
      improve(ind, lacomme_weights(with_child).back());
      offspring.push_back(std::move(ind));
    }

    // environmental selection over parents + offspring
    std::vector<Individual> combined = std::move(pop);
    for (auto& ind : offspring) combined.push_back(std::move(ind));
    std::vector<CostVector> all_costs;
    all_costs.reserve(combined.size());
    for (const auto& ind : combined) all_costs.push_back(ind.cost);
    std::vector<int> fronts = fast_nondominated_sort(all_costs);
    std::vector<double> crowd2(all_costs.size(), 0.0);
    int mf = *std::max_element(fronts.begin(), fronts.end());
    for (int f = 0; f <= mf; ++f) {
      auto d = crowding_distance(all_costs, fronts, f);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (fronts[i] == f) crowd2[i] = d[i];
    }
    std::vector<int> idx(combined.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (fronts[a] != fronts[b]) return fronts[a] < fronts[b];
      if (crowd2[a] != crowd2[b]) return crowd2[a] > crowd2[b];
      return a < b;
    });
    pop.clear();
    for (int i = 0; i < cfg.population; ++i)
      pop.push_back(std::move(combined[idx[i]]));
    record_hv();
  }
  return archive;
}

}  // namespace mgroute
