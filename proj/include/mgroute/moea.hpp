#ifndef MGROUTE_MOEA_HPP
#define MGROUTE_MOEA_HPP

#include <cstdint>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/rng.hpp"
#include "mgroute/scalarize.hpp"

namespace mgroute {

// Tour chromosome: gene = node * 100 + slot_index + 1, where the slot points
// toward the cyclic successor gene's node. Caps parallel edges at 99.
struct Chromosome {
  std::vector<int> genes;

  int node(std::size_t k) const { return genes[k] / 100; }
  int slot(std::size_t k) const { return genes[k] % 100 - 1; }
  bool operator==(const Chromosome&) const = default;
};

Chromosome encode(const Tour& tour);
// Throws ContractError when node parts are not a permutation or a slot part
// is out of range toward the successor.
Tour decode(const MultiGraphInstance& inst, const Chromosome& chrom);

// Equal-probability choice between re-sampling one gene's slot and reversing
// a contiguous node segment (slots stay attached to their nodes, then are
// clamped to the valid range toward the new successor).
Chromosome mutate(const MultiGraphInstance& inst, const Chromosome& chrom,
                  Rng& rng);

// Edge recombination over the node adjacency union of both parents. Slots
// are inherited from a parent traversing the same directed pair, otherwise
// the linear-best slot under pref.
Chromosome edge_recombination(const MultiGraphInstance& inst,
                              const Chromosome& parent_a,
                              const Chromosome& parent_b,
                              const Preference& pref, Rng& rng);

// Per-individual scalarization weights from population objective ranges.
// Collapsed range on objective i maps to weight 0; both collapsed to (.5,.5).
std::vector<Preference> lacomme_weights(const std::vector<CostVector>& pop_costs);

// Uniform random node order with uniform random slots toward the successor.
Chromosome random_chromosome(const MultiGraphInstance& inst, Rng& rng);

// Decodes a chromosome as a CVRP giant tour: rotate the depot first, then
// split greedily at capacity overflow. Depot legs take the linear-best slot
// under equal weights.
RouteSet decode_routes(const MultiGraphInstance& inst, const Chromosome& chrom);

struct MoeaConfig {
  int population = 32;       // >= 4 and even
  int generations = 1000;
  double mutation_rate = 0.5;
  double crossover_rate = 0.9;
  int local_search_moves = 20;  // 2-opt move budget per individual, 0 = off
  std::uint64_t seed = 0;
  CostVector hv_ref;         // non-empty enables per-generation HV stats

  void validate() const;
};

struct MoeaStats {
  std::vector<double> archive_hv;  // per generation, cumulative archive
};

// NSGA-II loop with the multigraph chromosome operators; returns the
// cumulative archive of every evaluated individual. Deterministic per seed.
ParetoArchive nsga2_run(const MultiGraphInstance& inst, ProblemKind kind,
                        const MoeaConfig& cfg, MoeaStats* stats = nullptr);

// Fast non-dominated sort; returns front index per individual (0 = best).
std::vector<int> fast_nondominated_sort(const std::vector<CostVector>& costs);

std::vector<double> crowding_distance(const std::vector<CostVector>& costs,
                                      const std::vector<int>& front_of,
                                      int front);

}  // namespace mgroute

#endif
