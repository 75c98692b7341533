#ifndef MGROUTE_METRICS_HPP
#define MGROUTE_METRICS_HPP

#include <string>
#include <vector>

#include "mgroute/core.hpp"

namespace mgroute {

struct HvResult {
  double value = 0.0;
  int clipped = 0;  // points discarded for exceeding the reference
};

// Exact hypervolume (minimization): Lebesgue measure of the union of boxes
// [p, ref]. m = 2 via a rectangle sweep, m = 3 via slicing on the third
// coordinate. Points not weakly dominating ref are clipped out and counted.
HvResult hypervolume(const std::vector<CostVector>& points,
                     const CostVector& ref);

// hypervolume / prod(ref_i), i.e. the ideal point is the origin.
HvResult normalized_hv(const std::vector<CostVector>& points,
                       const CostVector& ref);

// 100 * (best - hv) / best, in percent.
double hv_gap(double hv, double best_hv);

// HV reference presets per problem family, distribution and node count.
// dist is one of: euc, tmat, xasy, fixX, flexX (X = slot budget).
CostVector hv_reference(const std::string& problem, const std::string& dist,
                        int n, int m = 2);

}  // namespace mgroute

#endif
