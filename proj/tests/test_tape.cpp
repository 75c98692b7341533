#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "mgroute/neural/tape.hpp"
#include "mgroute/rng.hpp"

using namespace mgroute;
using namespace mgroute::neural;

namespace {

Tensor random_tensor(int r, int c, Rng& rng) {
  Tensor t(r, c);
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

// central finite differences against the tape gradient for a scalar-valued
// function of one leaf tensor
void fd_check(const Tensor& x0,
              const std::function<Var(Tape&, Var)>& build,
              double eps = 1e-6, double tol = 1e-7) {
  Tape tape;
  Var leaf = tape.leaf(x0);
  Var loss = build(tape, leaf);
  REQUIRE(tape.value(loss).size() == 1);
  tape.backward(loss);
  Tensor grad = tape.grad(leaf);
  REQUIRE(grad.rows == x0.rows);

  for (std::size_t i = 0; i < x0.size(); ++i) {
    Tensor plus = x0, minus = x0;
    plus.data[i] += eps;
    minus.data[i] -= eps;
    Tape tp, tm;
    double fp = tp.value(build(tp, tp.leaf(plus))).data[0];
    double fm = tm.value(build(tm, tm.leaf(minus))).data[0];
    double fd = (fp - fm) / (2.0 * eps);
    CHECK(grad.data[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
  }
}

// reduce any tensor to a scalar deterministically (weighted sum)
Var to_scalar(Tape& t, Var v) {
  const Tensor& val = t.value(v);
  Tensor w(val.cols, 1);
  for (std::size_t i = 0; i < w.size(); ++i)
    w.data[i] = 0.3 + 0.1 * static_cast<double>(i % 7);
  Var wv = t.constant(std::move(w));
  Var col = t.matmul(v, wv);  // [r,1]
  Var row_ones = t.constant([&] {
    Tensor o(1, val.rows);
    for (double& x : o.data) x = 1.0;
    return o;
  }());
  return t.matmul(row_ones, col);  // [1,1]
}

}  // namespace

TEST_CASE("gradients match finite differences per op") {
  Rng rng(1);
  Tensor x = random_tensor(4, 3, rng);
  Tensor other = random_tensor(4, 3, rng);
  Tensor mat = random_tensor(3, 5, rng);

  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.tanh(v)); });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.add(v, t.constant(other)));
  });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.sub(t.constant(other), v));
  });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.mul(v, t.constant(other)));
  });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.scale(v, -1.7)); });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.matmul(v, t.constant(mat)));
  });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.transpose(v)); });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.concat_cols(v, t.constant(other)));
  });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.slice_cols(v, 1, 3)); });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.reshape(v, 3, 4)); });
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.gather_rows(v, {2, 0, 0, 3}));
  });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.sum_rows(v)); });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.mean_rows(v)); });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.relu(v)); },
           1e-6, 1e-6);
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.instance_norm(v)); },
           1e-6, 1e-5);
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.layer_norm(v)); },
           1e-6, 1e-5);
  fd_check(x, [&](Tape& t, Var v) {
    return to_scalar(t, t.concat_rows({v, t.constant(other), v}));
  });

  Tensor vec = random_tensor(1, 6, rng);
  fd_check(vec, [&](Tape& t, Var v) { return to_scalar(t, t.softmax(v)); });
  fd_check(vec, [&](Tape& t, Var v) { return to_scalar(t, t.log_softmax(v)); });
  fd_check(vec, [&](Tape& t, Var v) { return t.pick(t.log_softmax(v), 2); });
  fd_check(x, [&](Tape& t, Var v) { return to_scalar(t, t.softmax_rows(v)); });
}

TEST_CASE("chained expression gradient") {
  Rng rng(2);
  Tensor x = random_tensor(3, 4, rng);
  Tensor w1 = random_tensor(4, 8, rng);
  Tensor w2 = random_tensor(8, 2, rng);
  fd_check(x, [&](Tape& t, Var v) {
    Var h = t.tanh(t.matmul(v, t.constant(w1)));
    Var o = t.matmul(h, t.constant(w2));
    return to_scalar(t, t.softmax_rows(o));
  });
}

TEST_CASE("gradient of c*tanh at zero equals c") {
  Tape tape;
  Tensor zero(1, 1);
  Var leaf = tape.leaf(zero);
  Var out = tape.scale(tape.tanh(leaf), 10.0);
  tape.backward(out);
  CHECK(tape.grad(leaf).data[0] == doctest::Approx(10.0));
}

TEST_CASE("loss independent of a leaf yields exactly zero gradient") {
  Tape tape;
  Rng rng(3);
  Var used = tape.leaf(random_tensor(2, 2, rng));
  Var unused = tape.leaf(random_tensor(2, 2, rng));
  Var loss = tape.pick(used, 0);
  tape.backward(loss);
  CHECK(tape.grad(unused).rows == 0);  // never touched
  CHECK(tape.grad(used).data[0] == 1.0);
}

TEST_CASE("detach stops gradient flow") {
  Tape tape;
  Rng rng(4);
  Tensor x = random_tensor(2, 2, rng);
  Var leaf = tape.leaf(x);
  Var loss = tape.pick(tape.detach(leaf), 0);
  tape.backward(loss);
  CHECK(tape.grad(leaf).rows == 0);
}

TEST_CASE("softmax output sums to one and matches direct computation") {
  Tape tape;
  Rng rng(5);
  Var v = tape.leaf(random_tensor(1, 9, rng));
  Var s = tape.softmax(v);
  double sum = 0.0;
  for (double p : tape.value(s).data) {
    CHECK(p >= 0.0);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}
