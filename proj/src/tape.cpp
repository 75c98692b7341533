#include "mgroute/neural/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mgroute::neural {

namespace {
constexpr double kNormEps = 1e-8;

void matmul_into(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
  // out[m,n] (+)= a[m,k] @ b[k,n], row-major friendly loop order
  if (!accumulate) std::fill(out.data.begin(), out.data.end(), 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
    double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
    for (int k = 0; k < a.cols; ++k) {
      double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
    }
  }
}

// out (+)= a^T @ g, where a is [m,k] and g is [m,n]; out is [k,n]
void matmul_at_into(const Tensor& a, const Tensor& g, Tensor& out) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
    const double* grow = &g.data[static_cast<std::size_t>(i) * g.cols];
    for (int k = 0; k < a.cols; ++k) {
      double av = arow[k];
      if (av == 0.0) continue;
      double* orow = &out.data[static_cast<std::size_t>(k) * out.cols];
      for (int j = 0; j < g.cols; ++j) orow[j] += av * grow[j];
    }
  }
}

// out (+)= g @ b^T, where g is [m,n] and b is [k,n]; out is [m,k]
void matmul_bt_into(const Tensor& g, const Tensor& b, Tensor& out) {
  for (int i = 0; i < g.rows; ++i) {
    const double* grow = &g.data[static_cast<std::size_t>(i) * g.cols];
    double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
    for (int k = 0; k < b.rows; ++k) {
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      double dot = 0.0;
      for (int j = 0; j < g.cols; ++j) dot += grow[j] * brow[j];
      orow[k] += dot;
    }
  }
}

}  // namespace

Var Tape::push(Tensor value, std::vector<int> args,
               std::function<void(Tape&, Node&)> back, bool needs_grad_override) {
  Node node;
  node.value = std::move(value);
  node.args = std::move(args);
  node.back = std::move(back);
  node.needs_grad = needs_grad_override;
  for (int a : node.args)
    if (nodes_[a].needs_grad) node.needs_grad = true;
#ifndef NDEBUG
  assert(node.value.all_finite() && "non-finite tensor produced");
#endif
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (n.grad.rows == 0) n.grad = Tensor(n.value.rows, n.value.cols);
  return n.grad;
}

Var Tape::leaf(const Tensor& value, bool needs_grad) {
  return push(value, {}, nullptr, needs_grad);
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "tape.add: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += tb.data[i];
  return push(std::move(out), {a.id, b.id}, [](Tape& t, Node& n) {
    for (int arg : n.args) {
      if (!t.wants_grad(arg)) continue;
      Tensor& g = t.grad_buf(arg);
      for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += n.grad.data[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "tape.sub: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= tb.data[i];
  return push(std::move(out), {a.id, b.id}, [](Tape& t, Node& n) {
    if (t.wants_grad(n.args[0])) {
      Tensor& g = t.grad_buf(n.args[0]);
      for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += n.grad.data[i];
    }
    if (t.wants_grad(n.args[1])) {
      Tensor& g = t.grad_buf(n.args[1]);
      for (std::size_t i = 0; i < g.size(); ++i) g.data[i] -= n.grad.data[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), "tape.mul: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= tb.data[i];
  return push(std::move(out), {a.id, b.id}, [](Tape& t, Node& n) {
    const Tensor& va = t.nodes_[n.args[0]].value;
    const Tensor& vb = t.nodes_[n.args[1]].value;
    if (t.wants_grad(n.args[0])) {
      Tensor& g = t.grad_buf(n.args[0]);
      for (std::size_t i = 0; i < g.size(); ++i)
        g.data[i] += n.grad.data[i] * vb.data[i];
    }
    if (t.wants_grad(n.args[1])) {
      Tensor& g = t.grad_buf(n.args[1]);
      for (std::size_t i = 0; i < g.size(); ++i)
        g.data[i] += n.grad.data[i] * va.data[i];
    }
  });
}

Var Tape::scale(Var a, double c) {
  Tensor out = value(a);
  for (double& v : out.data) v *= c;
  return push(std::move(out), {a.id}, [c](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += c * n.grad.data[i];
  });
}

Var Tape::add_tensor(Var a, const Tensor& tsr) {
  const Tensor& ta = value(a);
  require(ta.same_shape(tsr), "tape.add_tensor: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += tsr.data[i];
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += n.grad.data[i];
  });
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.cols == tb.rows, "tape.matmul: inner dimension mismatch");
  Tensor out(ta.rows, tb.cols);
  matmul_into(ta, tb, out, true);
  return push(std::move(out), {a.id, b.id}, [](Tape& t, Node& n) {
    const Tensor& va = t.nodes_[n.args[0]].value;
    const Tensor& vb = t.nodes_[n.args[1]].value;
    if (t.wants_grad(n.args[0])) matmul_bt_into(n.grad, vb, t.grad_buf(n.args[0]));
    if (t.wants_grad(n.args[1])) matmul_at_into(va, n.grad, t.grad_buf(n.args[1]));
  });
}

Var Tape::transpose(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.cols, ta.rows);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = 0; j < ta.cols; ++j) out.at(j, i) = ta.at(i, j);
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) g.at(j, i) += n.grad.at(i, j);
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.rows == tb.rows, "tape.concat_cols: row mismatch");
  Tensor out(ta.rows, ta.cols + tb.cols);
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < ta.cols; ++j) out.at(i, j) = ta.at(i, j);
    for (int j = 0; j < tb.cols; ++j) out.at(i, ta.cols + j) = tb.at(i, j);
  }
  const int split = ta.cols;
  return push(std::move(out), {a.id, b.id}, [split](Tape& t, Node& n) {
    if (t.wants_grad(n.args[0])) {
      Tensor& g = t.grad_buf(n.args[0]);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) g.at(i, j) += n.grad.at(i, j);
    }
    if (t.wants_grad(n.args[1])) {
      Tensor& g = t.grad_buf(n.args[1]);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) g.at(i, j) += n.grad.at(i, split + j);
    }
  });
}

Var Tape::concat_rows(const std::vector<Var>& rows) {
  require(!rows.empty(), "tape.concat_rows: empty input");
  int total = 0;
  const int cols = value(rows[0]).cols;
  for (Var v : rows) {
    require(value(v).cols == cols, "tape.concat_rows: col mismatch");
    total += value(v).rows;
  }
  Tensor out(total, cols);
  std::vector<int> args;
  args.reserve(rows.size());
  int at = 0;
  for (Var v : rows) {
    const Tensor& tv = value(v);
    std::copy(tv.data.begin(), tv.data.end(),
              out.data.begin() + static_cast<std::size_t>(at) * cols);
    at += tv.rows;
    args.push_back(v.id);
  }
  return push(std::move(out), std::move(args), [](Tape& t, Node& n) {
    int at = 0;
    for (int arg : n.args) {
      const Tensor& va = t.nodes_[arg].value;
      if (t.wants_grad(arg)) {
        Tensor& g = t.grad_buf(arg);
        for (std::size_t i = 0; i < g.size(); ++i)
          g.data[i] += n.grad.data[static_cast<std::size_t>(at) * g.cols + i];
      }
      at += va.rows;
    }
  });
}

Var Tape::slice_cols(Var a, int lo, int hi) {
  const Tensor& ta = value(a);
  require(0 <= lo && lo < hi && hi <= ta.cols, "tape.slice_cols: bad range");
  Tensor out(ta.rows, hi - lo);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = lo; j < hi; ++j) out.at(i, j - lo) = ta.at(i, j);
  return push(std::move(out), {a.id}, [lo](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) g.at(i, lo + j) += n.grad.at(i, j);
  });
}

Var Tape::reshape(Var a, int rows, int cols) {
  const Tensor& ta = value(a);
  require(static_cast<std::size_t>(rows) * cols == ta.size(),
          "tape.reshape: size mismatch");
  Tensor out(rows, cols, ta.data);
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += n.grad.data[i];
  });
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
  const Tensor& ta = value(a);
  Tensor out(static_cast<int>(idx.size()), ta.cols);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    require(idx[t] >= 0 && idx[t] < ta.rows, "tape.gather_rows: index range");
    std::copy_n(&ta.data[static_cast<std::size_t>(idx[t]) * ta.cols], ta.cols,
                &out.data[t * ta.cols]);
  }
  return push(std::move(out), {a.id},
              [idx = std::move(idx)](Tape& t, Node& n) {
                if (!t.wants_grad(n.args[0])) return;
                Tensor& g = t.grad_buf(n.args[0]);
                for (std::size_t r = 0; r < idx.size(); ++r)
                  for (int j = 0; j < g.cols; ++j)
                    g.at(idx[r], j) += n.grad.at(static_cast<int>(r), j);
              });
}

Var Tape::sum_rows(Var a) {
  const Tensor& ta = value(a);
  Tensor out(1, ta.cols);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = 0; j < ta.cols; ++j) out.at(0, j) += ta.at(i, j);
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) g.at(i, j) += n.grad.at(0, j);
  });
}

Var Tape::mean_rows(Var a) {
  const Tensor& ta = value(a);
  const double inv = 1.0 / ta.rows;
  Tensor out(1, ta.cols);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = 0; j < ta.cols; ++j) out.at(0, j) += ta.at(i, j) * inv;
  return push(std::move(out), {a.id}, [inv](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) g.at(i, j) += inv * n.grad.at(0, j);
  });
}

Var Tape::tanh(Var a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double y = n.value.data[i];
      g.data[i] += n.grad.data[i] * (1.0 - y * y);
    }
  });
}

Var Tape::relu(Var a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    const Tensor& x = t.nodes_[n.args[0]].value;
    Tensor& g = t.grad_buf(n.args[0]);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x.data[i] > 0.0) g.data[i] += n.grad.data[i];
  });
}

namespace {

void softmax_flat(const double* x, double* y, std::size_t k) {
  double mx = x[0];
  for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = std::exp(x[i] - mx);
    sum += y[i];
  }
  for (std::size_t i = 0; i < k; ++i) y[i] /= sum;
}

}  // namespace

Var Tape::softmax(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  softmax_flat(ta.data.data(), out.data.data(), ta.size());
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      dot += n.grad.data[i] * n.value.data[i];
    for (std::size_t i = 0; i < g.size(); ++i)
      g.data[i] += n.value.data[i] * (n.grad.data[i] - dot);
  });
}

Var Tape::log_softmax(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  double mx = ta.data[0];
  for (double v : ta.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : ta.data) sum += std::exp(v - mx);
  double lse = mx + std::log(sum);
  for (std::size_t i = 0; i < ta.size(); ++i) out.data[i] = ta.data[i] - lse;
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    double gsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gsum += n.grad.data[i];
    for (std::size_t i = 0; i < g.size(); ++i)
      g.data[i] += n.grad.data[i] - std::exp(n.value.data[i]) * gsum;
  });
}

Var Tape::softmax_rows(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  for (int i = 0; i < ta.rows; ++i)
    softmax_flat(&ta.data[static_cast<std::size_t>(i) * ta.cols],
                 &out.data[static_cast<std::size_t>(i) * ta.cols], ta.cols);
  return push(std::move(out), {a.id}, [](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    Tensor& g = t.grad_buf(n.args[0]);
    for (int i = 0; i < g.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < g.cols; ++j) dot += n.grad.at(i, j) * n.value.at(i, j);
      for (int j = 0; j < g.cols; ++j)
        g.at(i, j) += n.value.at(i, j) * (n.grad.at(i, j) - dot);
    }
  });
}

Var Tape::instance_norm(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  // column statistics cached for backward
  std::vector<double> inv_std(static_cast<std::size_t>(ta.cols));
  for (int j = 0; j < ta.cols; ++j) {
    double mean = 0.0;
    for (int i = 0; i < ta.rows; ++i) mean += ta.at(i, j);
    mean /= ta.rows;
    double var = 0.0;
    for (int i = 0; i < ta.rows; ++i) {
      double d = ta.at(i, j) - mean;
      var += d * d;
    }
    var /= ta.rows;
    double is = 1.0 / std::sqrt(var + kNormEps);
    inv_std[j] = is;
    for (int i = 0; i < ta.rows; ++i) out.at(i, j) = (ta.at(i, j) - mean) * is;
  }
  return push(std::move(out), {a.id},
              [inv_std = std::move(inv_std)](Tape& t, Node& n) {
                if (!t.wants_grad(n.args[0])) return;
                Tensor& g = t.grad_buf(n.args[0]);
                const int m = n.value.rows;
                for (int j = 0; j < n.value.cols; ++j) {
                  double gmean = 0.0, gymean = 0.0;
                  for (int i = 0; i < m; ++i) {
                    gmean += n.grad.at(i, j);
                    gymean += n.grad.at(i, j) * n.value.at(i, j);
                  }
                  gmean /= m;
                  gymean /= m;
                  for (int i = 0; i < m; ++i)
                    g.at(i, j) += inv_std[j] * (n.grad.at(i, j) - gmean -
                                                n.value.at(i, j) * gymean);
                }
              });
}

Var Tape::layer_norm(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  std::vector<double> inv_std(static_cast<std::size_t>(ta.rows));
  for (int i = 0; i < ta.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < ta.cols; ++j) mean += ta.at(i, j);
    mean /= ta.cols;
    double var = 0.0;
    for (int j = 0; j < ta.cols; ++j) {
      double d = ta.at(i, j) - mean;
      var += d * d;
    }
    var /= ta.cols;
    double is = 1.0 / std::sqrt(var + kNormEps);
    inv_std[i] = is;
    for (int j = 0; j < ta.cols; ++j) out.at(i, j) = (ta.at(i, j) - mean) * is;
  }
  return push(std::move(out), {a.id},
              [inv_std = std::move(inv_std)](Tape& t, Node& n) {
                if (!t.wants_grad(n.args[0])) return;
                Tensor& g = t.grad_buf(n.args[0]);
                const int d = n.value.cols;
                for (int i = 0; i < n.value.rows; ++i) {
                  double gmean = 0.0, gymean = 0.0;
                  for (int j = 0; j < d; ++j) {
                    gmean += n.grad.at(i, j);
                    gymean += n.grad.at(i, j) * n.value.at(i, j);
                  }
                  gmean /= d;
                  gymean /= d;
                  for (int j = 0; j < d; ++j)
                    g.at(i, j) += inv_std[i] * (n.grad.at(i, j) - gmean -
                                                n.value.at(i, j) * gymean);
                }
              });
}

Var Tape::pick(Var a, int index) {
  const Tensor& ta = value(a);
  require(index >= 0 && static_cast<std::size_t>(index) < ta.size(),
          "tape.pick: index out of range");
  Tensor out(1, 1);
  out.data[0] = ta.data[static_cast<std::size_t>(index)];
  return push(std::move(out), {a.id}, [index](Tape& t, Node& n) {
    if (!t.wants_grad(n.args[0])) return;
    t.grad_buf(n.args[0]).data[static_cast<std::size_t>(index)] +=
        n.grad.data[0];
  });
}

Var Tape::detach(Var a) { return push(value(a), {}, nullptr); }

void Tape::backward(Var loss) {
  require(loss.valid() && value(loss).size() == 1,
          "tape.backward: loss must be a scalar");
  grad_buf(loss.id).data[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.back || !n.needs_grad || n.grad.rows == 0) continue;
    n.back(*this, n);
  }
}

void Tape::reset() { nodes_.clear(); }

}  // namespace mgroute::neural
