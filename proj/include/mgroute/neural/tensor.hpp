#ifndef MGROUTE_NEURAL_TENSOR_HPP
#define MGROUTE_NEURAL_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/rng.hpp"

namespace mgroute::neural {

// Dense row-major matrix of doubles. Vectors are [1, d] or [k, 1].
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  Tensor(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    require(data.size() == static_cast<std::size_t>(r) * c, "Tensor: size mismatch");
  }

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  static Tensor zeros(int r, int c) { return Tensor(r, c); }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static Tensor init_uniform(int r, int c, Rng& rng) {
    Tensor t(r, c);
    double bound = 1.0 / std::sqrt(static_cast<double>(r));
    for (double& v : t.data) v = rng.uniform(-bound, bound);
    return t;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace mgroute::neural

#endif
