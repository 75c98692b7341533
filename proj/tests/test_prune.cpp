#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mgroute/problems.hpp"
#include "mgroute/prune.hpp"
#include "oracles.hpp"

using namespace mgroute;

namespace {

MultiGraphInstance pair_instance(const std::vector<CostVector>& slots01) {
  MultiGraphInstance inst = MultiGraphInstance::empty(3, 2);
  inst.pair_slots(0, 1) = slots01;
  inst.pair_slots(1, 0) = {{1, 1}};
  inst.pair_slots(1, 2) = {{1, 1}};
  inst.pair_slots(2, 1) = {{1, 1}};
  inst.pair_slots(0, 2) = {{1, 1}};
  inst.pair_slots(2, 0) = {{1, 1}};
  return inst;
}

}  // namespace

TEST_CASE("prune_linear keeps the argmin slot with index tie-break") {
  MultiGraphInstance a = pair_instance({{1, 3}, {2, 2}});
  CHECK(prune_linear(a, Preference({1, 0})).slot_of(0, 1) == 0);
  CHECK(prune_linear(a, Preference({0, 1})).slot_of(0, 1) == 1);

  MultiGraphInstance b = pair_instance({{1, 3}, {3, 1}});
  CHECK(prune_linear(b, Preference({0.5, 0.5})).slot_of(0, 1) == 0);  // tie
}

TEST_CASE("prune_linear output shape and reconstruction") {
  Rng rng(2);
  MultiGraphInstance inst = gen_fix(6, 3, 2, rng);
  Preference pref({0.3, 0.7});
  PrunedInstance pruned = prune_linear(inst, pref);
  CHECK(pruned.graph.max_parallel() == 1);
  check_instance(pruned.graph);
  // pruning never increases the scalarized cost of a fixed node order
  Tour order{{{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 4, 0}, {4, 5, 0}, {5, 0, 0}}};
  Tour lifted = pruned.reconstruct(order);
  for (std::size_t k = 0; k < lifted.steps.size(); ++k) {
    const EdgeRef& e = lifted.steps[k];
    // lifted slot is the argmin among the original pair's slots
    for (const auto& slot : inst.pair_slots(e.from, e.to))
      CHECK(linear_scalarize(inst.edge_cost(e), pref) <=
            linear_scalarize(slot, pref) + 1e-12);
  }
}

TEST_CASE("prune determinism") {
  Rng rng(5);
  MultiGraphInstance inst = gen_flex(7, 4, 2, rng);
  Preference pref({0.42, 0.58});
  auto a = prune_linear(inst, pref);
  auto b = prune_linear(inst, pref);
  CHECK(a.kept_slot == b.kept_slot);
}

TEST_CASE("prune_simple_heuristic matches prune_linear on mgmotsp") {
  Rng rng(6);
  MultiGraphInstance inst = gen_fix(6, 2, 2, rng);
  for (double l1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Preference pref({l1, 1.0 - l1});
    CHECK(prune_simple_heuristic(inst, pref).kept_slot ==
          prune_linear(inst, pref).kept_slot);
  }
}

TEST_CASE("check_prop1 holds on fix/flex instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec spec;
    spec.dist = seed % 2 == 0 ? Distribution::Fix : Distribution::Flex;
    spec.x = 2;
    spec.n = 4 + static_cast<int>(seed % 4);
    spec.m = 2;
    spec.problem = ProblemKind::MGMOTSP;
    spec.seed = seed;
    MultiGraphInstance inst = generate(spec, 0);
    for (double l1 : {0.0, 0.3, 1.0}) {
      CHECK(check_prop1(inst, Preference({l1, 1.0 - l1})));
    }
  }
}

TEST_CASE("check_prop1 trivially true on single-slot instances") {
  Rng rng(7);
  MultiGraphInstance inst = gen_xasy(5, 2, rng);
  CHECK(check_prop1(inst, Preference({0.5, 0.5})));
}

TEST_CASE("prune agrees with the independent enumeration oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenSpec spec;
    spec.dist = Distribution::Flex;
    spec.x = 3;
    spec.n = 5;
    spec.m = 2;
    spec.problem = ProblemKind::MGMOTSP;
    spec.seed = 100 + seed;
    MultiGraphInstance inst = generate(spec, 0);
    Preference pref({0.6, 0.4});
    PrunedInstance pruned = prune_linear(inst, pref);
    double full = test_oracles::min_scalar_tour(inst, pref.weights);
    double reduced = test_oracles::min_scalar_tour(pruned.graph, pref.weights);
    CHECK(full == doctest::Approx(reduced).epsilon(1e-12));
  }
}

TEST_CASE("simple pruning is heuristic for time windows: witness exists") {
  // search for an instance where the pruned graph misses the multigraph
  // optimum of the (violations, distance) objective under some preference
  bool witness = false;
  for (std::uint64_t seed = 0; seed < 60 && !witness; ++seed) {
    GenSpec spec;
    spec.dist = Distribution::Fix;
    spec.x = 2;
    spec.n = 5;
    spec.m = 2;
    spec.problem = ProblemKind::MGMOTSPTW;
    spec.seed = seed;
    MultiGraphInstance inst = generate(spec, 0);
    ParetoArchive full = exhaustive_pareto(inst, ProblemKind::MGMOTSPTW);
    for (double l1 : {0.1, 0.5, 0.9}) {
      Preference pref({l1, 1.0 - l1});
      PrunedInstance pruned = prune_simple_heuristic(inst, pref);
      ParetoArchive reduced = exhaustive_pareto(pruned.graph,
                                                ProblemKind::MGMOTSPTW);
      double best_full = 1e300, best_reduced = 1e300;
      for (const auto& e : full.entries())
        best_full = std::min(best_full, linear_scalarize(e.cost, pref));
      for (const auto& e : reduced.entries())
        best_reduced = std::min(best_reduced, linear_scalarize(e.cost, pref));
      // pruning can only lose tours, never gain them
      CHECK(best_reduced >= best_full - 1e-12);
      if (best_reduced > best_full + 1e-9) witness = true;
    }
  }
  CHECK(witness);
}
