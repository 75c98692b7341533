#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mgroute/gen.hpp"

using namespace mgroute;

TEST_CASE("euc distances are symmetric, bounded and valid") {
  Rng rng(1);
  MultiGraphInstance inst = gen_euc(10, 2, rng);
  check_instance(inst);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < inst.m; ++k) {
        double d = inst.pair_slots(i, j)[0][k];
        CHECK(d >= 0.0);
        CHECK(d <= std::sqrt(2.0) + 1e-12);
        CHECK(d == doctest::Approx(inst.pair_slots(j, i)[0][k]));
      }
    }
}

TEST_CASE("tmat satisfies the triangle inequality exhaustively") {
  Rng rng(2);
  MultiGraphInstance inst = gen_tmat(15, 2, rng);
  check_instance(inst);
  for (int k = 0; k < inst.m; ++k)
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j)
        for (int via = 0; via < inst.n; ++via) {
          if (i == j || i == via || j == via) continue;
          double dij = inst.pair_slots(i, j)[0][k];
          double dik = inst.pair_slots(i, via)[0][k];
          double dkj = inst.pair_slots(via, j)[0][k];
          CHECK(dij <= dik + dkj + 1e-12);
        }
}

TEST_CASE("tmat closure is a fixpoint and matrices are asymmetric") {
  bool found_asymmetry = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    MultiGraphInstance inst = gen_tmat(8, 1, rng);
    // one more closure pass must change nothing
    for (int via = 0; via < inst.n; ++via)
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
          if (i == j || i == via || j == via) continue;
          double alt = inst.pair_slots(i, via)[0][0] +
                       inst.pair_slots(via, j)[0][0];
          CHECK(inst.pair_slots(i, j)[0][0] <= alt + 1e-15);
        }
    for (int i = 0; i < inst.n && !found_asymmetry; ++i)
      for (int j = i + 1; j < inst.n && !found_asymmetry; ++j)
        if (inst.pair_slots(i, j)[0][0] != inst.pair_slots(j, i)[0][0])
          found_asymmetry = true;
  }
  CHECK(found_asymmetry);
}

TEST_CASE("xasy bounds, triangle violations and feature independence") {
  Rng rng(3);
  MultiGraphInstance inst = gen_xasy(10, 2, rng);
  check_instance(inst);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      CHECK(inst.pair_slots(i, j)[0][0] > 0.0);
      CHECK(inst.pair_slots(i, j)[0][0] < 1.0);
    }
  // triangle inequality violated with overwhelming probability at n >= 5
  int violated_seeds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng r(seed * 31 + 7);
    MultiGraphInstance x = gen_xasy(6, 1, r);
    bool violated = false;
    for (int i = 0; i < x.n && !violated; ++i)
      for (int j = 0; j < x.n && !violated; ++j)
        for (int via = 0; via < x.n && !violated; ++via) {
          if (i == j || i == via || j == via) continue;
          if (x.pair_slots(i, j)[0][0] >
              x.pair_slots(i, via)[0][0] + x.pair_slots(via, j)[0][0])
            violated = true;
        }
    if (violated) ++violated_seeds;
  }
  CHECK(violated_seeds >= 9);

  // objective-1 and objective-2 entries are uncorrelated
  Rng r2(77);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  int count = 0;
  for (int rep = 0; rep < 100; ++rep) {
    MultiGraphInstance x = gen_xasy(12, 2, r2);
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < x.n; ++j) {
        if (i == j) continue;
        double a = x.pair_slots(i, j)[0][0];
        double b = x.pair_slots(i, j)[0][1];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
        ++count;
      }
  }
  double corr = (sxy / count - sx / count * sy / count) /
                (std::sqrt(sxx / count - sx / count * sx / count) *
                 std::sqrt(syy / count - sy / count * sy / count));
  CHECK(corr > -0.02);
  CHECK(corr < 0.02);
}

TEST_CASE("fix distribution: sorted attributes, mutually non-dominated") {
  Rng rng(4);
  MultiGraphInstance inst = gen_fix(8, 3, 2, rng);
  check_instance(inst);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      REQUIRE(slots.size() == 3);
      // slot 0 carries the minimum objective-1 value
      for (std::size_t s = 1; s < slots.size(); ++s) {
        CHECK(slots[0][0] <= slots[s][0]);
        CHECK(slots[s - 1][0] <= slots[s][0]);  // ascending
        CHECK(slots[s - 1][1] >= slots[s][1]);  // descending
      }
      for (std::size_t a = 0; a < slots.size(); ++a)
        for (std::size_t b = 0; b < slots.size(); ++b)
          if (a != b) CHECK_FALSE(dominates(slots[a], slots[b]));
    }
  // x = 1 degenerates to plain sampling
  Rng rng1(5);
  MultiGraphInstance single = gen_fix(5, 1, 2, rng1);
  CHECK(single.max_parallel() == 1);
}

TEST_CASE("fix m=3 keeps the third attribute unsorted") {
  Rng rng(6);
  MultiGraphInstance inst = gen_fix(6, 4, 3, rng);
  check_instance(inst);
  bool third_out_of_order = false;
  for (int i = 0; i < inst.n && !third_out_of_order; ++i)
    for (int j = 0; j < inst.n && !third_out_of_order; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      for (std::size_t s = 1; s < slots.size(); ++s)
        if (slots[s - 1][2] > slots[s][2]) third_out_of_order = true;
    }
  CHECK(third_out_of_order);
}

TEST_CASE("flex distribution: dominance-filtered slots") {
  Rng rng(7);
  MultiGraphInstance inst = gen_flex(8, 5, 2, rng);
  check_instance(inst);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      CHECK(slots.size() >= 1);
      CHECK(slots.size() <= 5);
      for (std::size_t a = 0; a < slots.size(); ++a)
        for (std::size_t b = 0; b < slots.size(); ++b)
          if (a != b) CHECK_FALSE(dominates(slots[a], slots[b]));
    }
  Rng rng1(8);
  CHECK(gen_flex(5, 1, 2, rng1).max_parallel() == 1);
}

TEST_CASE("flex2 expected retained count is about 1.5") {
  Rng rng(9);
  long total = 0;
  long pairs = 0;
  for (int rep = 0; rep < 60; ++rep) {
    MultiGraphInstance inst = gen_flex(10, 2, 2, rng);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j) {
        if (i == j) continue;
        total += inst.parallel_count(i, j);
        ++pairs;
      }
  }
  double mean = static_cast<double>(total) / pairs;  // analytic: 1.5
  CHECK(mean > 1.45);
  CHECK(mean < 1.55);
}

TEST_CASE("attach_cvrp demands and capacity tiers") {
  for (auto [n, cap] : {std::pair{10, 30}, {20, 30}, {21, 40}, {50, 40}, {51, 50}}) {
    Rng rng(static_cast<std::uint64_t>(n));
    MultiGraphInstance inst = gen_xasy(n, 1, rng);
    attach_cvrp(inst, rng);
    CHECK(*inst.capacity == cap);
    CHECK(*inst.depot == 0);
    CHECK(inst.demands[0] == 0);
    for (int v = 1; v < n; ++v) {
      CHECK(inst.demands[v] >= 1);
      CHECK(inst.demands[v] <= 9);
    }
    check_instance(inst);
  }
}

TEST_CASE("attach_time_windows medium scheme") {
  Rng rng(11);
  MultiGraphInstance inst = gen_fix(12, 2, 2, rng);
  inst.depot = 0;
  attach_time_windows(inst, rng);
  check_instance(inst);
  const double horizon = 0.5 * 12;
  for (int v = 1; v < inst.n; ++v) {
    CHECK(inst.windows[v].start < inst.windows[v].end);
    CHECK(inst.windows[v].start >= 0.0);
    CHECK(inst.windows[v].start <= horizon);
    double width = inst.windows[v].end - inst.windows[v].start;
    CHECK(width >= 0.05 * horizon - 1e-12);
    CHECK(width <= 0.2 * horizon + 1e-12);
  }

  // windows of distinct nodes are uncorrelated
  Rng r2(13);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  int count = 0;
  for (int rep = 0; rep < 400; ++rep) {
    MultiGraphInstance x = gen_fix(5, 2, 2, r2);
    x.depot = 0;
    attach_time_windows(x, r2);
    double a = x.windows[1].start;
    double b = x.windows[2].start;
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
    ++count;
  }
  double corr = (sxy / count - sx / count * sy / count) /
                (std::sqrt(sxx / count - sx / count * sx / count) *
                 std::sqrt(syy / count - sy / count * sy / count));
  CHECK(std::fabs(corr) < 0.1);
}

TEST_CASE("generate is deterministic per (spec, index)") {
  GenSpec spec;
  spec.dist = Distribution::Fix;
  spec.x = 2;
  spec.n = 8;
  spec.m = 2;
  spec.problem = ProblemKind::MGMOTSP;
  spec.seed = 123;
  MultiGraphInstance a = generate(spec, 5);
  MultiGraphInstance b = generate(spec, 5);
  CHECK(instance_to_json(a) == instance_to_json(b));
  MultiGraphInstance c = generate(spec, 6);
  CHECK(instance_to_json(a) != instance_to_json(c));
  // worker-count independence: generating 0..9 in any order gives the same
  // instance at index 5
  auto batch = generate_batch(spec, 10);
  CHECK(instance_to_json(batch[5]) == instance_to_json(a));
}

TEST_CASE("save/load round trip is exact and canonical") {
  GenSpec spec;
  spec.dist = Distribution::Flex;
  spec.x = 3;
  spec.n = 6;
  spec.m = 2;
  spec.problem = ProblemKind::MGMOCVRP;
  spec.seed = 99;
  auto batch = generate_batch(spec, 20);
  std::string path = "test_instances_tmp.jsonl";
  save_instances(path, batch);
  auto loaded = load_instances(path);
  REQUIRE(loaded.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    CHECK(instance_to_json(loaded[i]) == instance_to_json(batch[i]));
  // byte-identical second save
  std::string path2 = "test_instances_tmp2.jsonl";
  save_instances(path2, loaded);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("load rejects malformed and invalid records with line numbers") {
  std::string path = "test_bad_tmp.jsonl";
  {
    std::ofstream out(path);
    out << "{\"n\":3,\"m\":1,\"edges\":[[0,1,[[0.5]]],[0,2,[[0.5]]],"
           "[1,0,[[0.5]]],[1,2,[[0.5]]],[2,0,[[0.5]]],[2,1,[[0.5]]]]}\n";
    out << "{\"n\":3,\"m\":1,\"edges\":[[0,1,[[0.5]]]]}\n";  // missing pairs
  }
  CHECK_THROWS_WITH_AS(load_instances(path),
                       doctest::Contains("line 2"), ContractError);
  {
    std::ofstream out(path);
    out << "{\"n\":3,\"m\":1,\"edges\":[[0,1,[[0.5]]\n";  // truncated json
  }
  CHECK_THROWS_WITH_AS(load_instances(path),
                       doctest::Contains("line 1"), ContractError);
  std::remove(path.c_str());
}

TEST_CASE("distribution and problem name parsing") {
  int x = 0;
  CHECK(parse_distribution("FIX2", x) == Distribution::Fix);
  CHECK(x == 2);
  CHECK(parse_distribution("flex5", x) == Distribution::Flex);
  CHECK(x == 5);
  CHECK(parse_distribution("tmat", x) == Distribution::Tmat);
  CHECK(x == 1);
  CHECK_THROWS_AS(parse_distribution("bogus", x), ContractError);
  CHECK(parse_problem("MGMOTSPTW") == ProblemKind::MGMOTSPTW);
  CHECK(distribution_name(Distribution::Fix, 2) == "fix2");
}
