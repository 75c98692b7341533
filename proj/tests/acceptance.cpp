// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code. Run a subset with
// e.g. `acceptance 1 3 7`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "mgroute/bench.hpp"
#include "mgroute/heur.hpp"
#include "mgroute/metrics.hpp"
#include "mgroute/moea.hpp"
#include "mgroute/neural/train.hpp"
#include "mgroute/problems.hpp"
#include "mgroute/prune.hpp"

using namespace mgroute;

namespace {

int g_checks_failed = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++g_checks_failed;
    std::cout << "    check failed: " << what << "\n";
  }
}

// --------------------------------------------------------------------------
// independent enumeration oracle (duplicated from the unit-test oracles so
// the acceptance binary is self-contained)

void enumerate_tours(const MultiGraphInstance& inst,
                     const std::function<void(const std::vector<EdgeRef>&)>& fn) {
  const int n = inst.n;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<EdgeRef> steps;
  std::function<void(int)> dfs = [&](int leg) {
    if (leg == n) {
      fn(steps);
      return;
    }
    int from = order[leg];
    int to = order[(leg + 1) % n];
    for (int s = 0; s < inst.parallel_count(from, to); ++s) {
      steps.push_back({from, to, s});
      dfs(leg + 1);
      steps.pop_back();
    }
  };
  do {
    dfs(0);
  } while (std::next_permutation(order.begin() + 1, order.end()));
}

CostVector tour_cost(const MultiGraphInstance& inst,
                     const std::vector<EdgeRef>& steps) {
  CostVector c(static_cast<std::size_t>(inst.m), 0.0);
  for (const EdgeRef& e : steps) {
    const CostVector& x = inst.pair_slots(e.from, e.to)[e.slot];
    for (int k = 0; k < inst.m; ++k) c[k] += x[k];
  }
  return c;
}

double min_scalar_tour_oracle(const MultiGraphInstance& inst,
                              const std::vector<double>& w) {
  double best = std::numeric_limits<double>::infinity();
  enumerate_tours(inst, [&](const std::vector<EdgeRef>& steps) {
    double s = 0.0;
    for (const EdgeRef& e : steps) {
      const CostVector& c = inst.pair_slots(e.from, e.to)[e.slot];
      for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * c[k];
    }
    best = std::min(best, s);
  });
  return best;
}

GenSpec spec_of(const char* dist, const char* problem, int n, std::uint64_t seed) {
  GenSpec spec;
  spec.dist = parse_distribution(dist, spec.x);
  spec.problem = parse_problem(problem);
  spec.n = n;
  spec.m = spec.problem == ProblemKind::MOCVRP ? 1 : 2;
  spec.seed = seed;
  return spec;
}

// --------------------------------------------------------------------------

bool criterion1_prop1() {
  const double tol = 1e-9;
  auto prefs = preference_grid(2, 11);
  for (const char* dist : {"fix2", "flex2", "flex5"}) {
    GenSpec spec = spec_of(dist, "mgmotsp", 4, 20250001);
    for (int i = 0; i < 200; ++i) {
      spec.n = 4 + i % 4;  // 50 instances per size in {4..7}
      MultiGraphInstance inst = generate(spec, static_cast<std::uint64_t>(i));
      for (const Preference& pref : prefs) {
        double full = min_scalar_tour_oracle(inst, pref.weights);
        PrunedInstance pruned = prune_linear(inst, pref);
        double reduced = min_scalar_tour_oracle(pruned.graph, pref.weights);
        if (std::fabs(full - reduced) >= tol) {
          expect(false, std::string(dist) + " instance " + std::to_string(i) +
                            ": |" + std::to_string(full) + " - " +
                            std::to_string(reduced) + "| >= 1e-9");
          return false;
        }
      }
    }
  }
  return true;
}

bool criterion2_pareto_oracle() {
  bool ok = true;
  const double tol = 1e-9;
  auto cheb_grid = preference_grid(2, 1001);
  const char* dists[] = {"xasy", "tmat", "fix2", "flex2", "flex3"};
  const char* problems[] = {"motsp", "motsp", "mgmotsp", "mgmotsp", "mgmotsp"};
  for (int i = 0; i < 50; ++i) {
    GenSpec spec = spec_of(dists[i % 5], problems[i % 5], 4 + i % 4,
                           20250002 + i);
    MultiGraphInstance inst = generate(spec, 0);
    ProblemKind kind = spec.problem;

    // (a) archive value set == pareto_filter of all enumerated tour costs
    std::vector<CostVector> all;
    enumerate_tours(inst, [&](const std::vector<EdgeRef>& steps) {
      all.push_back(tour_cost(inst, steps));
    });
    std::vector<CostVector> expected = pareto_filter(all);
    ParetoArchive archive = exhaustive_pareto(inst, kind);
    std::vector<CostVector> got = archive.costs();
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    if (got != expected) {
      expect(false, "instance " + std::to_string(i) + ": archive differs");
      ok = false;
      continue;
    }

    // (b) every strictly-positive linear optimum lies in the archive
    for (int g = 1; g < 10; ++g) {
      Preference pref({g / 10.0, 1.0 - g / 10.0});
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : all) best = std::min(best, linear_scalarize(c, pref));
      double best_in_archive = std::numeric_limits<double>::infinity();
      for (const auto& c : got)
        best_in_archive = std::min(best_in_archive, linear_scalarize(c, pref));
      if (std::fabs(best - best_in_archive) > tol) {
        expect(false, "instance " + std::to_string(i) +
                          ": linear optimum missing from archive");
        ok = false;
      }
    }

    // (c) each archive point is weakly Chebyshev-optimal: checked on the
    // 1001-point grid, falling back to the analytic witness preference
    // lam* ~ (1/p1, 1/p2) when the point's optimality interval is narrower
    // than the grid spacing (the grid covers the front only at its own
    // resolution; at lam* weak optimality is exact for Pareto points)
    IdealPoint z = IdealPoint::zeros(2);
    for (const auto& p : got) {
      bool covered = false;
      for (const Preference& lam : cheb_grid) {
        double mine = chebyshev_scalarize(p, lam, z);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : got)
          best = std::min(best, chebyshev_scalarize(q, lam, z));
        if (mine <= best + tol) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        double w1 = 1.0 / p[0];
        double w2 = 1.0 / p[1];
        Preference lam_star({w1 / (w1 + w2), w2 / (w1 + w2)});
        double mine = chebyshev_scalarize(p, lam_star, z);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : got)
          best = std::min(best, chebyshev_scalarize(q, lam_star, z));
        covered = mine <= best + tol;
      }
      if (!covered) {
        expect(false, "instance " + std::to_string(i) +
                          ": archive point not Chebyshev-covered");
        ok = false;
      }
    }
  }
  return ok;
}

bool criterion3_hypervolume() {
  bool ok = true;
  // hand cases, exact to 1e-12
  expect(std::fabs(hypervolume({{1, 1}}, {2, 2}).value - 1.0) < 1e-12,
         "unit square");
  expect(std::fabs(hypervolume({{1, 2}, {2, 1}}, {3, 3}).value - 3.0) < 1e-12,
         "two-box inclusion-exclusion");
  ok = g_checks_failed == 0;

  Rng rng(20250003);
  for (int front = 0; front < 100; ++front) {
    int count = 2 + static_cast<int>(rng.uniform_int(15));
    std::vector<CostVector> pts;
    for (int i = 0; i < count; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    CostVector ref{1.0, 1.0};
    double exact = hypervolume(pts, ref).value;
    // Monte Carlo oracle, 1e6 samples. A correct sweep still lands outside
    // 3se once in ~370 draws, so a front gets two fresh re-estimates before
    // counting as failed; an implementation bias persists across retries.
    bool within = false;
    double last_mc = 0.0, last_se = 0.0;
    for (int attempt = 0; attempt < 3 && !within; ++attempt) {
      const int samples = 1000000;
      int hits = 0;
      for (int s = 0; s < samples; ++s) {
        double x = rng.uniform(), y = rng.uniform();
        for (const auto& p : pts) {
          if (p[0] <= x && p[1] <= y) {
            ++hits;
            break;
          }
        }
      }
      double mc = static_cast<double>(hits) / samples;
      double se = std::sqrt(mc * (1.0 - mc) / samples);
      within = std::fabs(exact - mc) <= 3.0 * se + 1e-12;
      last_mc = mc;
      last_se = se;
    }
    if (!within) {
      expect(false, "front " + std::to_string(front) + ": |" +
                        std::to_string(exact) + " - " +
                        std::to_string(last_mc) + "| > 3se (se " +
                        std::to_string(last_se) + ") in 3 attempts");
      ok = false;
    }
  }
  return ok;
}

bool criterion4_local_search() {
  bool ok = true;
  Rng master(20250004);
  int trajectories = 0;
  // 10^4 random trajectories; per-iteration monotonicity via max_moves=1
  while (trajectories < 10000) {
    Rng rng(master.next_u64());
    int n = 6 + static_cast<int>(rng.uniform_int(3));
    MultiGraphInstance inst =
        trajectories % 2 == 0 ? gen_flex(n, 3, 2, rng) : gen_xasy(n, 2, rng);
    double l1 = rng.uniform();
    Preference pref({l1, 1.0 - l1});
    Tour t;
    {
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);
      for (int k = 0; k < n; ++k) {
        int from = order[k], to = order[(k + 1) % n];
        t.steps.push_back({from, to,
                           static_cast<int>(rng.uniform_int(
                               static_cast<std::uint64_t>(inst.parallel_count(from, to))))});
      }
    }
    double cost = linear_scalarize(eval_tsp(inst, t), pref);
    for (int iter = 0; iter < 50; ++iter) {
      Tour next = two_opt_multigraph(inst, t, pref, 1);
      double next_cost = linear_scalarize(eval_tsp(inst, next), pref);
      if (next_cost > cost + 1e-12) {
        expect(false, "iteration increased the scalarized cost");
        ok = false;
        break;
      }
      if (next == t) break;
      t = next;
      cost = next_cost;
    }
    ++trajectories;
  }

  // fixpoints include the exhaustive optimum at n <= 7
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    GenSpec spec = spec_of(seed % 2 == 0 ? "fix2" : "flex3", "mgmotsp",
                           5 + static_cast<int>(seed % 3), 20250005 + seed);
    MultiGraphInstance inst = generate(spec, 0);
    Preference pref({0.4, 0.6});
    ParetoArchive archive = exhaustive_pareto(inst, ProblemKind::MGMOTSP);
    double best_s = std::numeric_limits<double>::infinity();
    const ArchiveEntry* best = nullptr;
    for (const auto& e : archive.entries()) {
      double s = linear_scalarize(e.cost, pref);
      if (s < best_s) {
        best_s = s;
        best = &e;
      }
    }
    Tour after = two_opt_multigraph(inst, std::get<Tour>(best->sol), pref, 0);
    if (std::fabs(linear_scalarize(eval_tsp(inst, after), pref) - best_s) > 1e-12) {
      expect(false, "2-opt left the exhaustive optimum");
      ok = false;
    }
  }

  // NN / NI / FI always produce valid tours
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(20250006 + seed);
    MultiGraphInstance inst = gen_xasy(5 + static_cast<int>(seed % 12), 2, rng);
    Preference pref = sample_preference(2, rng);
    if (!validate_tour(inst, nearest_neighbor(inst, pref,
                                              static_cast<int>(seed) % inst.n))
             .empty() ||
        !validate_tour(inst, nearest_insertion(inst, pref)).empty() ||
        !validate_tour(inst, farthest_insertion(inst, pref)).empty()) {
      expect(false, "constructive heuristic produced an invalid tour");
      ok = false;
    }
  }
  return ok;
}

bool criterion5_moea() {
  bool ok = true;
  GenSpec spec = spec_of("fix2", "mgmotsp", 10, 20250007);
  CostVector ref = hv_reference("mgmotsp", "fix2", 10);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MultiGraphInstance inst = generate(spec, seed);
    MoeaConfig cfg;
    cfg.population = 16;
    cfg.generations = 30;
    cfg.local_search_moves = 10;
    cfg.seed = 900 + seed;
    cfg.hv_ref = ref;
    MoeaStats stats;
    ParetoArchive moea = nsga2_run(inst, ProblemKind::MGMOTSP, cfg, &stats);
    for (std::size_t g = 1; g < stats.archive_hv.size(); ++g) {
      if (stats.archive_hv[g] < stats.archive_hv[g - 1] - 1e-12) {
        expect(false, "archive HV decreased in a generation");
        ok = false;
      }
    }
    // budget-matched uniform random tour sampling:
    // population + generations * (offspring + improvement) evaluations
    int budget = cfg.population * (1 + 2 * cfg.generations);
    Rng rng(4000 + seed);
    ParetoArchive random_archive;
    for (int i = 0; i < budget; ++i) {
      Chromosome c = random_chromosome(inst, rng);
      Tour t = decode(inst, c);
      CostVector cost = eval_tsp(inst, t);
      random_archive.insert(std::move(cost), std::move(t));
    }
    double hv_moea = hypervolume(moea.costs(), ref).value;
    double hv_rand = hypervolume(random_archive.costs(), ref).value;
    if (hv_moea > hv_rand) ++wins;
  }
  if (wins < 19) {
    expect(false, "moea beat random sampling in only " + std::to_string(wins) +
                      "/20 seeds");
    ok = false;
  }
  std::cout << "    moea vs random: " << wins << "/20 wins\n";
  return ok;
}

// finite differences on a per-head surrogate loss with frozen samples
template <typename LossFn>
double max_fd_rel_error(neural::ParameterSet& params, const LossFn& loss_fn,
                        const std::map<std::string, neural::Tensor>& grads,
                        const std::function<bool(const std::string&)>& in_scope) {
  const double eps = 1e-4;
  double max_rel = 0.0;
  for (auto& [path, p] : params.params) {
    if (!in_scope(path)) continue;
    auto git = grads.find(path);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double keep = p.data[i];
      p.data[i] = keep + eps;
      double fp = loss_fn();
      p.data[i] = keep - eps;
      double fm = loss_fn();
      p.data[i] = keep;
      double fd = (fp - fm) / (2.0 * eps);
      double g = git == grads.end() ? 0.0 : git->second.data[i];
      double rel =
          std::fabs(fd - g) / std::max({1.0, std::fabs(fd), std::fabs(g)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

bool criterion6_neural() {
  bool ok = true;
  using namespace neural;
  ModelConfig cfg;
  cfg.embed_dim = 8;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.l1 = 2;
  cfg.l2 = 1;
  cfg.l3 = 1;
  cfg.hyper_hidden = 4;
  cfg.ffn_mult = 2;
  cfg.kind = ProblemKind::MGMOTSP;
  cfg.cost_dim = 2;

  GenSpec spec = spec_of("fix2", "mgmotsp", 5, 20250008);
  MultiGraphInstance inst = generate(spec, 0);
  Preference pref({0.45, 0.55});

  // ---- GMS-EB end-to-end gradient check
  {
    GmsEb model = GmsEb::init(cfg, 101);
    EdgeIndex ei = EdgeIndex::build(inst);
    std::vector<Solution> sols;
    std::vector<double> coeffs;
    {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var emb = model.encode(ctx, inst, ei);
      Rng rng(7);
      auto rollouts =
          model.rollout(ctx, inst, ei, emb, pref, DecodeMode::Sample, 3, rng);
      for (std::size_t j = 0; j < rollouts.size(); ++j) {
        sols.push_back(rollouts[j].sol);
        coeffs.push_back(0.4 * (static_cast<double>(j) - 1.0) + 0.1);
      }
    }
    auto loss_fn = [&]() {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var emb = model.encode(ctx, inst, ei);
      Rng rng(0);
      auto rollouts = model.rollout(ctx, inst, ei, emb, pref,
                                    DecodeMode::Sample, 3, rng, &sols);
      double total = 0.0;
      for (std::size_t j = 0; j < rollouts.size(); ++j)
        total += coeffs[j] * rollouts[j].log_prob_value;
      return total;
    };
    std::map<std::string, Tensor> grads;
    {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var emb = model.encode(ctx, inst, ei);
      Rng rng(0);
      auto rollouts = model.rollout(ctx, inst, ei, emb, pref,
                                    DecodeMode::Sample, 3, rng, &sols);
      Var loss;
      for (std::size_t j = 0; j < rollouts.size(); ++j) {
        Var term = tape.scale(rollouts[j].log_prob, coeffs[j]);
        loss = loss.valid() ? tape.add(loss, term) : term;
      }
      tape.backward(loss);
      ctx.accumulate_grads(grads);
    }
    double rel = max_fd_rel_error(model.params, loss_fn, grads,
                                  [](const std::string&) { return true; });
    std::cout << "    gms-eb max fd rel error: " << rel << "\n";
    if (rel >= 1e-5) {
      expect(false, "gms-eb gradient check");
      ok = false;
    }
  }

  // ---- GMS-DH: both heads
  {
    GmsDh model = GmsDh::init(cfg, 103);
    EdgeIndex ei = EdgeIndex::build(inst);
    std::vector<std::vector<int>> frozen_sel;
    std::vector<Solution> frozen_tours;
    {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var trunk = model.encode_trunk(ctx, inst, ei);
      Rng rng(11);
      auto sels = model.select(ctx, inst, ei, trunk, pref, DecodeMode::Sample,
                               2, rng);
      for (const auto& s : sels) frozen_sel.push_back(s.kept_slot);
      Var node_emb =
          model.node_embeddings(ctx, inst, ei, trunk, sels[0].kept_slot);
      auto tours = model.rollout(ctx, inst, node_emb, sels[0].kept_slot, pref,
                                 DecodeMode::Sample, 3, rng);
      for (const auto& r : tours) frozen_tours.push_back(r.sol);
    }
    std::vector<double> c1 = {0.7, -0.4};
    std::vector<double> c2 = {0.5, -0.2, 0.3};

    auto sel_loss_fn = [&]() {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var trunk = model.encode_trunk(ctx, inst, ei);
      Rng rng(0);
      auto sels = model.select(ctx, inst, ei, trunk, pref, DecodeMode::Sample,
                               2, rng, &frozen_sel);
      double total = 0.0;
      for (std::size_t j = 0; j < sels.size(); ++j)
        total += c1[j] * sels[j].log_prob_value;
      return total;
    };
    auto route_loss_fn = [&]() {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var trunk = model.encode_trunk(ctx, inst, ei);
      Var node_emb = model.node_embeddings(ctx, inst, ei, trunk, frozen_sel[0]);
      Rng rng(0);
      auto tours = model.rollout(ctx, inst, node_emb, frozen_sel[0], pref,
                                 DecodeMode::Sample, 3, rng, &frozen_tours);
      double total = 0.0;
      for (std::size_t k = 0; k < tours.size(); ++k)
        total += c2[k] * tours[k].log_prob_value;
      return total;
    };

    std::map<std::string, Tensor> sel_grads, route_grads;
    {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var trunk = model.encode_trunk(ctx, inst, ei);
      Rng rng(0);
      auto sels = model.select(ctx, inst, ei, trunk, pref, DecodeMode::Sample,
                               2, rng, &frozen_sel);
      Var loss;
      for (std::size_t j = 0; j < sels.size(); ++j) {
        Var term = tape.scale(sels[j].log_prob, c1[j]);
        loss = loss.valid() ? tape.add(loss, term) : term;
      }
      tape.backward(loss);
      ctx.accumulate_grads(sel_grads);
    }
    {
      Tape tape;
      ParamContext ctx(tape, model.params);
      Var trunk = model.encode_trunk(ctx, inst, ei);
      Var node_emb = model.node_embeddings(ctx, inst, ei, trunk, frozen_sel[0]);
      Rng rng(0);
      auto tours = model.rollout(ctx, inst, node_emb, frozen_sel[0], pref,
                                 DecodeMode::Sample, 3, rng, &frozen_tours);
      Var loss;
      for (std::size_t k = 0; k < tours.size(); ++k) {
        Var term = tape.scale(tours[k].log_prob, c2[k]);
        loss = loss.valid() ? tape.add(loss, term) : term;
      }
      tape.backward(loss);
      ctx.accumulate_grads(route_grads);
    }
    // selection head: theta-tilde parameters only (encoder frozen by design)
    double rel_sel =
        max_fd_rel_error(model.params, sel_loss_fn, sel_grads,
                         [](const std::string& p) {
                           return GmsDh::is_selection_path(p);
                         });
    // routing head: everything the routing loss differentiates
    double rel_route =
        max_fd_rel_error(model.params, route_loss_fn, route_grads,
                         [](const std::string& p) {
                           return !GmsDh::is_selection_path(p);
                         });
    std::cout << "    gms-dh selection head max fd rel error: " << rel_sel
              << "\n    gms-dh routing head max fd rel error: " << rel_route
              << "\n";
    if (rel_sel >= 1e-5 || rel_route >= 1e-5) {
      expect(false, "gms-dh gradient check");
      ok = false;
    }
  }

  // ---- parallel-edge permutation equivariance (encoder + selection probs)
  {
    GmsDh model = GmsDh::init(cfg, 107);
    MultiGraphInstance swapped = inst;
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j) {
        if (i == j || (i + j) % 2) continue;
        std::swap(swapped.pair_slots(i, j)[0], swapped.pair_slots(i, j)[1]);
      }
    EdgeIndex ei = EdgeIndex::build(inst);
    EdgeIndex eis = EdgeIndex::build(swapped);
    Tape t1, t2;
    ParamContext cx1(t1, model.params), cx2(t2, model.params);
    Var trunk1 = model.encode_trunk(cx1, inst, ei);
    Var trunk2 = model.encode_trunk(cx2, swapped, eis);
    Rng rng(0);
    auto sel1 = model.select(cx1, inst, ei, trunk1, pref, DecodeMode::Greedy, 1,
                             rng);
    auto sel2 = model.select(cx2, swapped, eis, trunk2, pref, DecodeMode::Greedy,
                             1, rng);
    const neural::Tensor& e1 = t1.value(trunk1);
    const neural::Tensor& e2 = t2.value(trunk2);
    double max_diff = 0.0;
    std::size_t pair_at = 0;
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j) {
        if (i == j) continue;
        bool flip = (i + j) % 2 == 0;
        for (int s = 0; s < 2; ++s) {
          int a = ei.edge_id(i, j, s);
          int b = eis.edge_id(i, j, flip ? 1 - s : s);
          for (int c = 0; c < e1.cols; ++c)
            max_diff = std::max(max_diff, std::fabs(e1.at(a, c) - e2.at(b, c)));
        }
        const auto& p1 = sel1[0].pair_probs[pair_at];
        const auto& p2 = sel2[0].pair_probs[pair_at];
        for (int s = 0; s < 2; ++s)
          max_diff = std::max(
              max_diff, std::fabs(p1[s] - p2[flip ? 1 - s : s]));
        ++pair_at;
      }
    std::cout << "    permutation equivariance max deviation: " << max_diff
              << "\n";
    if (max_diff >= 1e-5) {
      expect(false, "parallel-edge permutation equivariance");
      ok = false;
    }
  }

  // ---- probability normalization over feasible supports
  {
    GmsEb model = GmsEb::init(cfg, 109);
    EdgeIndex ei = EdgeIndex::build(inst);
    Tape tape;
    ParamContext ctx(tape, model.params);
    Var emb = model.encode(ctx, inst, ei);
    Rng rng(5);
    auto rollouts =
        model.rollout(ctx, inst, ei, emb, pref, DecodeMode::Sample, 5, rng);
    for (const auto& r : rollouts)
      for (const auto& probs : r.step_probs) {
        double sum = 0.0;
        for (double p : probs) sum += p;
        if (std::fabs(sum - 1.0) > 1e-6) {
          expect(false, "step probabilities sum to " + std::to_string(sum));
          ok = false;
        }
      }
    GmsDh dh = GmsDh::init(cfg, 113);
    Tape tape2;
    ParamContext ctx2(tape2, dh.params);
    Var trunk = dh.encode_trunk(ctx2, inst, ei);
    auto sels = dh.select(ctx2, inst, ei, trunk, pref, DecodeMode::Sample, 2,
                          rng);
    for (const auto& s : sels)
      for (const auto& probs : s.pair_probs) {
        double sum = 0.0;
        for (double p : probs) sum += p;
        if (std::fabs(sum - 1.0) > 1e-6) {
          expect(false, "pair probabilities sum to " + std::to_string(sum));
          ok = false;
        }
      }
  }
  return ok;
}

bool criterion7_training() {
  bool ok = true;
  using namespace neural;

  // ---- GMS-EB on XASY MOTSP n=10 vs the NN scalarized sweep
  {
    ModelConfig cfg;
    cfg.embed_dim = 32;
    cfg.heads = 4;
    cfg.layers = 2;
    cfg.hyper_hidden = 64;
    cfg.ffn_mult = 2;
    cfg.kind = ProblemKind::MOTSP;
    cfg.cost_dim = 2;

    TrainConfig tc;
    tc.batch_size = 16;
    tc.lr = 1e-3;
    tc.k_rollouts = 10;
    tc.seed = 20250009;
    tc.val_instances = 50;
    tc.val_prefs = 21;

    TrainStage stage;
    stage.gen = spec_of("xasy", "motsp", 10, 20250010);
    stage.epochs = 4;
    stage.batches_per_epoch = 500;  // ~2000 batches total

    GmsEb model = GmsEb::init(cfg, tc.seed);
    curriculum_run_eb(model, {stage}, tc);

    // held-out evaluation set, disjoint from the training stream
    GenSpec val_spec = stage.gen;
    val_spec.seed = stage.gen.seed ^ 0x9e3779b97f4a7c15ULL;
    auto held_out = generate_batch(val_spec, 50);
    auto prefs = preference_grid(2, 21);
    CostVector ref = hv_reference("motsp", "xasy", 10);
    double model_hv = 0.0, nn_hv = 0.0;
    for (const auto& inst : held_out) {
      model_hv += normalized_hv(eval_eb_greedy(model, inst, prefs).costs(),
                                ref).value / 50.0;
      SweepConfig nn;
      nn_hv += normalized_hv(
                   scalarized_sweep(inst, ProblemKind::MOTSP, prefs, nn).costs(),
                   ref).value / 50.0;
    }
    std::cout << "    gms-eb HV " << model_hv << " vs nn sweep HV " << nn_hv
              << "\n";
    if (!(model_hv > nn_hv)) {
      expect(false, "trained gms-eb did not beat the nn sweep");
      ok = false;
    }
  }

  // ---- GMS-DH on FIX2 MGMOTSP n=10 vs untrained simple-pruning baseline
  {
    ModelConfig cfg;
    cfg.embed_dim = 32;
    cfg.heads = 4;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.l3 = 1;
    cfg.hyper_hidden = 64;
    cfg.ffn_mult = 2;
    cfg.kind = ProblemKind::MGMOTSP;
    cfg.cost_dim = 2;

    TrainConfig tc;
    tc.batch_size = 8;
    tc.lr = 1e-3;
    tc.k1 = 2;
    tc.k2 = 10;
    tc.seed = 20250011;
    tc.val_instances = 50;
    tc.val_prefs = 21;

    TrainStage pre;  // simple-graph warm-up for the routing head
    pre.gen = spec_of("xasy", "motsp", 10, 20250012);
    pre.epochs = 1;
    pre.batches_per_epoch = 250;
    TrainStage stage;
    stage.gen = spec_of("fix2", "mgmotsp", 10, 20250013);
    stage.epochs = 3;
    stage.batches_per_epoch = 250;

    GmsDh trained = GmsDh::init(cfg, tc.seed);
    GmsDh untrained = GmsDh::init(cfg, tc.seed);  // same init, never trained
    curriculum_run_dh(trained, {pre, stage}, tc);

    GenSpec val_spec = stage.gen;
    val_spec.seed = stage.gen.seed ^ 0x9e3779b97f4a7c15ULL;
    auto held_out = generate_batch(val_spec, 50);
    auto prefs = preference_grid(2, 21);
    CostVector ref = hv_reference("mgmotsp", "fix2", 10);
    double trained_hv = 0.0, baseline_hv = 0.0;
    for (const auto& inst : held_out) {
      trained_hv += normalized_hv(eval_dh_greedy(trained, inst, prefs).costs(),
                                  ref).value / 50.0;
      baseline_hv += normalized_hv(
                         eval_dh_greedy(untrained, inst, prefs, true).costs(),
                         ref).value / 50.0;
    }
    std::cout << "    gms-dh HV " << trained_hv
              << " vs untrained gms-dh-simple HV " << baseline_hv << "\n";
    if (!(trained_hv > baseline_hv)) {
      expect(false, "trained gms-dh did not beat the untrained simple baseline");
      ok = false;
    }
  }
  return ok;
}

bool criterion8_determinism() {
  bool ok = true;
  const std::string dir = "acceptance_tmp_";

  // instance files reproduce bitwise
  GenSpec spec = spec_of("flex3", "mgmotsp", 8, 20250014);
  auto batch1 = generate_batch(spec, 20);
  auto batch2 = generate_batch(spec, 20);
  std::string f1 = dir + "a.jsonl", f2 = dir + "b.jsonl";
  save_instances(f1, batch1);
  save_instances(f2, batch2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  if (slurp(f1) != slurp(f2)) {
    expect(false, "instance generation is not bitwise reproducible");
    ok = false;
  }

  // save/load round trip exact
  auto loaded = load_instances(f1);
  save_instances(f2, loaded);
  if (slurp(f1) != slurp(f2)) {
    expect(false, "save/load round trip changed bytes");
    ok = false;
  }

  // heuristic solutions and MOEA archives bitwise per seed
  SolveOptions heur_opts;
  heur_opts.solver = "nn2opt";
  heur_opts.pref_count = 11;
  SolveOptions moea_opts;
  moea_opts.solver = "moea";
  moea_opts.pref_count = 11;
  moea_opts.seed = 5;
  moea_opts.moea.population = 8;
  moea_opts.moea.generations = 5;
  for (const SolveOptions& opts : {heur_opts, moea_opts}) {
    std::string x1, x2;
    for (int i = 0; i < 5; ++i) {
      x1 += archive_to_json(
          i, solve_instance(batch1[i], ProblemKind::MGMOTSP, opts, i));
      x2 += archive_to_json(
          i, solve_instance(batch1[i], ProblemKind::MGMOTSP, opts, i));
    }
    if (x1 != x2) {
      expect(false, opts.solver + " archives are not bitwise reproducible");
      ok = false;
    }
  }

  // workers=1 vs workers=8 produce identical bytes
  {
    SolveOptions opts = heur_opts;
    auto job = [&](int i) {
      return solve_instance(batch1[i], ProblemKind::MGMOTSP, opts, i);
    };
    auto seq = parallel_eval<ParetoArchive>(20, 1, job);
    auto par = parallel_eval<ParetoArchive>(20, 8, job);
    std::string s1, s2;
    for (int i = 0; i < 20; ++i) {
      s1 += archive_to_json(i, seq[i]);
      s2 += archive_to_json(i, par[i]);
    }
    if (s1 != s2) {
      expect(false, "workers=1 vs workers=8 outputs differ");
      ok = false;
    }
  }

  // single-threaded training trajectories are bitwise identical
  {
    using namespace neural;
    ModelConfig cfg;
    cfg.embed_dim = 16;
    cfg.heads = 2;
    cfg.layers = 1;
    cfg.l1 = 2;
    cfg.l2 = 1;
    cfg.l3 = 1;
    cfg.hyper_hidden = 8;
    cfg.ffn_mult = 2;
    cfg.kind = ProblemKind::MGMOTSP;
    cfg.cost_dim = 2;
    TrainConfig tc;
    tc.batch_size = 2;
    tc.k1 = 2;
    tc.k2 = 4;
    tc.k_rollouts = 4;
    tc.seed = 31;
    tc.val_instances = 2;
    tc.val_prefs = 3;
    TrainStage stage;
    stage.gen = spec_of("fix2", "mgmotsp", 6, 20250015);
    stage.epochs = 1;
    stage.batches_per_epoch = 5;
    GmsDh m1 = GmsDh::init(cfg, 1);
    GmsDh m2 = GmsDh::init(cfg, 1);
    curriculum_run_dh(m1, {stage}, tc);
    curriculum_run_dh(m2, {stage}, tc);
    for (const auto& [path, t] : m1.params.params) {
      if (!(m2.params.at(path).data == t.data)) {
        expect(false, "training trajectory diverged at " + path);
        ok = false;
        break;
      }
    }
  }

  std::remove(f1.c_str());
  std::remove(f2.c_str());
  return ok;
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "Proposition 1 equivalence (fix2/flex2/flex5, n in 4..7, 11 prefs)",
       criterion1_prop1},
      {2, "Pareto archive vs enumeration oracle + scalarization coverage",
       criterion2_pareto_oracle},
      {3, "hypervolume: hand cases exact, 2D sweep vs 1e6-sample Monte Carlo",
       criterion3_hypervolume},
      {4, "2-opt monotone per iteration, optimum fixpoint, NN/NI/FI validity",
       criterion4_local_search},
      {5, "NSGA-II beats budget-matched random sampling; archive monotone",
       criterion5_moea},
      {6, "neural gradients vs central differences; equivariance; normalization",
       criterion6_neural},
      {7, "desk-scale training beats untrained/heuristic baselines",
       criterion7_training},
      {8, "bitwise determinism and exact round trips", criterion8_determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.fn();
    } catch (const std::exception& e) {
      std::cout << "    exception: " << e.what() << "\n";
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, secs);
    if (!pass) ++failures;
  }
  return failures == 0 && g_checks_failed == 0 ? 0 : 1;
}
