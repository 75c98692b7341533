#ifndef MGROUTE_SCALARIZE_HPP
#define MGROUTE_SCALARIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/rng.hpp"

namespace mgroute {

// Simplex weight vector: non-negative, sums to 1 (checked to 1e-9).
struct Preference {
  std::vector<double> weights;

  explicit Preference(std::vector<double> w) : weights(std::move(w)) {
    double sum = 0.0;
    for (double x : weights) {
      require(x >= 0.0 && std::isfinite(x), "Preference: negative weight");
      sum += x;
    }
    require(std::fabs(sum - 1.0) <= 1e-9, "Preference: weights must sum to 1");
  }

  std::size_t dim() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

// Per-objective lower reference for Chebyshev scalarization. All generated
// costs are strictly positive sums, so the all-zero point is a valid ideal.
struct IdealPoint {
  std::vector<double> values;

  static IdealPoint zeros(int m) {
    return IdealPoint{std::vector<double>(static_cast<std::size_t>(m), 0.0)};
  }
};

enum class ScalarKind { Linear, Chebyshev };

inline double linear_scalarize(const CostVector& cost, const Preference& pref) {
  require(cost.size() == pref.dim(), "linear_scalarize: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < cost.size(); ++i) s += pref[i] * cost[i];
  return s;
}

inline double chebyshev_scalarize(const CostVector& cost, const Preference& pref,
                                  const IdealPoint& z) {
  require(cost.size() == pref.dim() && cost.size() == z.values.size(),
          "chebyshev_scalarize: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < cost.size(); ++i)
    s = std::max(s, pref[i] * std::fabs(cost[i] - z.values[i]));
  return s;
}

inline double scalarize(const CostVector& cost, const Preference& pref,
                        const IdealPoint& z, ScalarKind kind) {
  return kind == ScalarKind::Linear ? linear_scalarize(cost, pref)
                                    : chebyshev_scalarize(cost, pref, z);
}

// Negative scalarized cost.
inline double reward(const CostVector& cost, const Preference& pref,
                     const IdealPoint& z, ScalarKind kind) {
  return -scalarize(cost, pref, z, kind);
}

namespace detail {
// Simplex-lattice preferences for m = 3: all (a, b, c) >= 0 with
// a + b + c = divisions, scaled by 1/divisions. Count = C(divisions + 2, 2).
inline void simplex_lattice3(int divisions, std::vector<Preference>& out) {
  for (int a = divisions; a >= 0; --a) {
    for (int b = divisions - a; b >= 0; --b) {
      int c = divisions - a - b;
      double d = static_cast<double>(divisions);
      out.emplace_back(std::vector<double>{a / d, b / d, c / d});
    }
  }
}
}  // namespace detail

// m = 2: count points linearly spaced between (1,0) and (0,1).
// m = 3: simplex lattice; count must equal C(H+2, 2) for some divisions H.
inline std::vector<Preference> preference_grid(int m, int count) {
  require(count >= 2, "preference_grid: count must be >= 2");
  std::vector<Preference> out;
  out.reserve(static_cast<std::size_t>(count));
  if (m == 2) {
    for (int k = 0; k < count; ++k) {
      double l1 = static_cast<double>(count - 1 - k) / (count - 1);
      out.emplace_back(std::vector<double>{l1, 1.0 - l1});
    }
    // endpoints exact
    out.front() = Preference({1.0, 0.0});
    out.back() = Preference({0.0, 1.0});
    return out;
  }
  if (m == 3) {
    for (int h = 1;; ++h) {
      int lattice = (h + 2) * (h + 1) / 2;
      if (lattice == count) {
        detail::simplex_lattice3(h, out);
        return out;
      }
      require(lattice < count,
              "preference_grid: m=3 count must be a simplex-lattice size "
              "C(H+2,2), e.g. 105 or 1035");
    }
  }
  throw ContractError("preference_grid: only m in {2,3} supported");
}

// m = 2: lambda_1 ~ Unif[0,1]; m > 2: flat Dirichlet via exponentials.
inline Preference sample_preference(int m, Rng& rng) {
  require(m >= 2, "sample_preference: m must be >= 2");
  if (m == 2) {
    double l1 = rng.uniform();
    return Preference({l1, 1.0 - l1});
  }
  std::vector<double> w(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    // guard the log; Unif[0,1) can return exactly 0
    x = -std::log(1.0 - u);
    sum += x;
  }
  for (double& x : w) x /= sum;
  // renormalize exactly
  double s2 = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) s2 += w[i];
  w.back() = 1.0 - s2;
  if (w.back() < 0.0) w.back() = 0.0;
  return Preference(std::move(w));
}

}  // namespace mgroute

#endif
