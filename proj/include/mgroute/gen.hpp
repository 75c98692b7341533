#ifndef MGROUTE_GEN_HPP
#define MGROUTE_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/rng.hpp"

namespace mgroute {

enum class Distribution { Euc, Tmat, Xasy, Fix, Flex };
enum class ProblemKind { MOTSP, MOCVRP, MGMOTSP, MGMOCVRP, MGMOTSPTW };

Distribution parse_distribution(const std::string& name, int& x_out);
std::string distribution_name(Distribution d, int x);
ProblemKind parse_problem(const std::string& name);
std::string problem_name(ProblemKind k);

struct GenSpec {
  Distribution dist = Distribution::Euc;
  int n = 0;
  int m = 2;
  int x = 1;  // parallel-edge budget, FIX/FLEX only
  ProblemKind problem = ProblemKind::MOTSP;
  std::uint64_t seed = 0;

  void validate() const;
};

// m independent coordinate sets in the unit square; one symmetric edge per
// pair per objective.
MultiGraphInstance gen_euc(int n, int m, Rng& rng);

// m independent asymmetric matrices with Uniform(0,1) entries, closed under
// d_ij <- min(d_ij, d_ik + d_kj) to a triangle-inequality fixpoint.
MultiGraphInstance gen_tmat(int n, int m, Rng& rng);

// Every off-diagonal entry independent Uniform(0,1); no post-processing.
MultiGraphInstance gen_xasy(int n, int m, Rng& rng);

// Exactly x parallel edges per ordered pair; objective 1 ascending across
// slots, objective 2 descending, objective 3 (m = 3) left in sample order.
MultiGraphInstance gen_fix(int n, int x, int m, Rng& rng);

// Up to x parallel edges per pair: independent samples, dominated ones removed.
MultiGraphInstance gen_flex(int n, int x, int m, Rng& rng);

// Node 0 becomes the depot; demands Uniform{1..9}; capacity 30/40/50 for
// n <= 20 / <= 50 / larger.
void attach_cvrp(MultiGraphInstance& inst, Rng& rng);

// Medium time windows over horizon T = 0.5 * n: start ~ U(0, T),
// width ~ U(0.05 T, 0.2 T). Depot (node 0) carries no window.
void attach_time_windows(MultiGraphInstance& inst, Rng& rng);

// One instance per (spec, index), index-derived stream; bit-identical
// regardless of generation order.
MultiGraphInstance generate(const GenSpec& spec, std::uint64_t index);
std::vector<MultiGraphInstance> generate_batch(const GenSpec& spec, int count);

// JSON-lines, one instance per line, canonical field order, doubles with
// 17 significant digits. save(load(save(x))) == save(x) byte-for-byte.
void save_instances(const std::string& path,
                    const std::vector<MultiGraphInstance>& instances);
std::vector<MultiGraphInstance> load_instances(const std::string& path);

std::string instance_to_json(const MultiGraphInstance& inst);
MultiGraphInstance instance_from_json(const std::string& line, int lineno = 0);

// Invariant check used by load and by generator tests.
void check_instance(const MultiGraphInstance& inst);

}  // namespace mgroute

#endif
