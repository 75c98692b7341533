#include "mgroute/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mgroute {

namespace {

// Keeps points weakly dominating ref; counts the rest.
std::vector<CostVector> clip_to_ref(const std::vector<CostVector>& points,
                                    const CostVector& ref, int& clipped) {
  std::vector<CostVector> kept;
  clipped = 0;
  for (const auto& p : points) {
    require(p.size() == ref.size(), "hypervolume: dimension mismatch");
    bool inside = true;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > ref[i]) {
        inside = false;
        break;
      }
    }
    if (inside)
      kept.push_back(p);
    else
      ++clipped;
  }
  return kept;
}

double hv2d(std::vector<CostVector> pts, double r1, double r2) {
  if (pts.empty()) return 0.0;
  // sort by first objective; dominated points contribute nothing and are
  // skipped by the running-minimum check
  std::sort(pts.begin(), pts.end(), [](const CostVector& a, const CostVector& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  double area = 0.0;
  double prev_y = r2;
  for (const auto& p : pts) {
    if (p[1] < prev_y) {
      area += (r1 - p[0]) * (prev_y - p[1]);
      prev_y = p[1];
    }
  }
  return area;
}

double hv3d(std::vector<CostVector> pts, const CostVector& ref) {
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const CostVector& a, const CostVector& b) {
    return a[2] < b[2];
  });
  // sweep slabs along the third axis; within a slab the covered area is the
  // 2D hypervolume of the projections of all points at or below it
  double volume = 0.0;
  std::vector<CostVector> proj;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    proj.push_back({pts[k][0], pts[k][1]});
    double z_lo = pts[k][2];
    double z_hi = (k + 1 < pts.size()) ? pts[k + 1][2] : ref[2];
    if (z_hi > z_lo)
      volume += hv2d(proj, ref[0], ref[1]) * (z_hi - z_lo);
  }
  return volume;
}

}  // namespace

HvResult hypervolume(const std::vector<CostVector>& points,
                     const CostVector& ref) {
  require(ref.size() == 2 || ref.size() == 3,
          "hypervolume: only m in {2,3} supported");
  HvResult res;
  std::vector<CostVector> kept = clip_to_ref(points, ref, res.clipped);
  if (kept.empty()) return res;
  res.value = ref.size() == 2 ? hv2d(std::move(kept), ref[0], ref[1])
                              : hv3d(std::move(kept), ref);
  return res;
}

HvResult normalized_hv(const std::vector<CostVector>& points,
                       const CostVector& ref) {
  HvResult res = hypervolume(points, ref);
  double box = 1.0;
  for (double r : ref) box *= r;
  require(box > 0.0, "normalized_hv: reference box must have positive volume");
  res.value /= box;
  return res;
}

double hv_gap(double hv, double best_hv) {
  require(best_hv > 0.0, "hv_gap: best_hv must be positive");
  return 100.0 * (best_hv - hv) / best_hv;
}

CostVector hv_reference(const std::string& problem, const std::string& dist,
                        int n, int m) {
  auto fill = [m](double v) {
    return CostVector(static_cast<std::size_t>(m), v);
  };
  bool fix = dist.rfind("fix", 0) == 0;
  auto size_ref = [&](double r20, double r50, double r100) {
    if (n <= 20) return r20;
    if (n <= 50) return r50;
    if (n <= 100) return r100;
    if (n <= 150) return 90.0;
    return 120.0;
  };
  if (problem == "motsp") return fill(size_ref(15, 30, 60));
  if (problem == "mocvrp") return {size_ref(15, 40, 60), 3.0};
  if (problem == "mgmotsp") {
    if (fix) return fill(static_cast<double>(n));
    return fill(size_ref(15, 30, 60));
  }
  if (problem == "mgmocvrp") {
    if (fix) return fill(static_cast<double>(n));
    return fill(size_ref(15, 40, 60));
  }
  if (problem == "mgmotsptw") {
    double dist_ref = fix ? static_cast<double>(n) : size_ref(15, 30, 60);
    return {static_cast<double>(n) + 5.0, dist_ref};
  }
  throw ContractError("hv_reference: unknown problem '" + problem + "'");
}

}  // namespace mgroute
