#ifndef MGROUTE_NEURAL_TAPE_HPP
#define MGROUTE_NEURAL_TAPE_HPP

#include <functional>
#include <string>
#include <vector>

#include "mgroute/neural/tensor.hpp"

namespace mgroute::neural {

// Handle into the tape; 0-based node id.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Eager reverse-mode tape. Forward results are computed at op creation;
// backward() walks the nodes in reverse seeding d(loss)/d(loss) = 1.
// One tape per instance forward+backward pass; reset() reuses storage.
class Tape {
 public:
  Var leaf(const Tensor& value, bool needs_grad = true);
  Var constant(Tensor value) { return push(std::move(value), {}, nullptr); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);                 // elementwise
  Var scale(Var a, double c);
  Var add_tensor(Var a, const Tensor& t);  // constant offset
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var concat_cols(Var a, Var b);
  Var concat_rows(const std::vector<Var>& rows);
  Var slice_cols(Var a, int lo, int hi);
  Var reshape(Var a, int rows, int cols);
  Var gather_rows(Var a, std::vector<int> idx);
  Var sum_rows(Var a);                   // [m,d] -> [1,d]
  Var mean_rows(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var softmax(Var a);                    // over all entries
  Var log_softmax(Var a);
  Var softmax_rows(Var a);               // per row
  Var instance_norm(Var a);              // per column across rows, no affine
  Var layer_norm(Var a);                 // per row, no affine
  Var pick(Var a, int index);            // flat index -> [1,1]
  Var detach(Var a);                     // value copy, stops gradients

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  // Seeds d(loss) = 1 (loss must be [1,1]) and accumulates gradients.
  void backward(Var loss);

  void reset();
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> args;
    std::function<void(Tape&, Node&)> back;
    bool needs_grad = false;
  };

  Var push(Tensor value, std::vector<int> args,
           std::function<void(Tape&, Node&)> back, bool needs_grad_override = false);
  Tensor& grad_buf(int id);
  bool wants_grad(int id) const { return nodes_[id].needs_grad; }

  std::vector<Node> nodes_;
};

}  // namespace mgroute::neural

#endif
