#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <vector>

#include "handrec/ad/tensor.hpp"

namespace handrec::ad {

class Tape;

// Handle to a tape node. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
};

using SparseMat = Eigen::SparseMatrix<double>;

// Reverse-mode tape over dense tensors. Record the graph once (leaves plus
// ops), then alternate set_value / forward / backward to replay it with new
// leaf values; node values and gradients are updated in place, so replaying
// identical inputs is bitwise reproducible. Single-threaded per tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value);      // differentiable input
  Var constant(Tensor value);  // non-differentiable input

  // Replaces a leaf/constant value; the shape must match the recorded one.
  void set_value(Var v, Tensor value);

  // In-place access to a leaf/constant value (optimizer updates).
  Tensor& mutable_value(Var v);

  const Tensor& value(Var v) const;

  // Gradient of the last backward() root w.r.t. node v.
  const Tensor& grad(Var v) const;

  // Recomputes every op node in recording order.
  void forward();

  // Accumulates gradients for every node the root depends on. The root must
  // be scalar. Clears previous gradients first.
  void backward(Var root);

  int n_nodes() const { return static_cast<int>(nodes_.size()); }

  // --- primitive ops -----------------------------------------------------
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var div(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var scalar_mul(Var a, Var s);  // s is a scalar tensor
  Var matmul(Var a, Var b);
  Var sparse_matmul(std::shared_ptr<const SparseMat> s, Var x);
  Var gather_rows(Var x, std::vector<int> idx);  // index -1 gathers zeros
  Var gather_cols(Var x, std::vector<int> idx);
  Var concat_rows(const std::vector<Var>& xs);
  Var concat_cols(const std::vector<Var>& xs);
  Var transpose(Var x);
  Var reshape(Var x, Shape s);
  Var reduce_sum(Var x);  // scalar
  Var square(Var x);
  Var sqrt(Var x);  // gradient defined as 0 where the input is 0
  Var abs(Var x);   // gradient sign(x), sign(0) = 0
  Var row_norms(Var x);  // n x d -> n x 1 Euclidean row norms
  Var softmax_rows(Var x);
  Var leaky_relu(Var x, double alpha);  // gradient at 0 is alpha
  // Rows of euler (n x 3) are intrinsic XYZ Euler angles in radians;
  // output rows are the row-major 3x3 rotations R = Rx(a) Ry(b) Rz(c),
  // shape {n, 3, 3}.
  Var euler_to_rotmat(Var euler);
  // out[i,:] = sum_c s(i,c) * centers(i,c,:); centers has shape {n, C, 3}.
  Var blend_rows(Var s, Tensor centers);
  // points (m x 3) -> (m x 2) pinhole projection (f x/z + cx, f y/z + cy).
  // Throws at forward time if any z <= 0, identifying the point.
  Var pinhole_project(Var points, double focal, double cx, double cy);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    std::function<void(Tape&, int)> fwd;  // null for leaves/constants
    std::function<void(Tape&, int)> bwd;
    bool requires_grad = false;
  };

  Var emplace(Tensor value, std::vector<int> parents,
              std::function<void(Tape&, int)> fwd,
              std::function<void(Tape&, int)> bwd);
  const Node& node(Var v) const;
  Node& node_at(int id) { return nodes_[static_cast<size_t>(id)]; }

  std::vector<Node> nodes_;
  bool grads_valid_ = false;

  friend struct TapeOps;
};

// Free-function sugar so expressions read naturally.
inline Var add(Var a, Var b) { return a.tape->add(a, b); }
inline Var sub(Var a, Var b) { return a.tape->sub(a, b); }
inline Var mul(Var a, Var b) { return a.tape->mul(a, b); }
inline Var div(Var a, Var b) { return a.tape->div(a, b); }
inline Var scale(Var a, double c) { return a.tape->scale(a, c); }
inline Var add_scalar(Var a, double c) { return a.tape->add_scalar(a, c); }
inline Var scalar_mul(Var a, Var s) { return a.tape->scalar_mul(a, s); }
inline Var matmul(Var a, Var b) { return a.tape->matmul(a, b); }
inline Var sparse_matmul(std::shared_ptr<const SparseMat> s, Var x) {
  return x.tape->sparse_matmul(std::move(s), x);
}
inline Var gather_rows(Var x, std::vector<int> idx) {
  return x.tape->gather_rows(x, std::move(idx));
}
inline Var gather_cols(Var x, std::vector<int> idx) {
  return x.tape->gather_cols(x, std::move(idx));
}
inline Var concat_rows(const std::vector<Var>& xs) {
  return xs.front().tape->concat_rows(xs);
}
inline Var concat_cols(const std::vector<Var>& xs) {
  return xs.front().tape->concat_cols(xs);
}
inline Var transpose(Var x) { return x.tape->transpose(x); }
inline Var reshape(Var x, Shape s) {
  return x.tape->reshape(x, std::move(s));
}
inline Var reduce_sum(Var x) { return x.tape->reduce_sum(x); }
inline Var square(Var x) { return x.tape->square(x); }
inline Var sqrt(Var x) { return x.tape->sqrt(x); }
inline Var abs(Var x) { return x.tape->abs(x); }
inline Var row_norms(Var x) { return x.tape->row_norms(x); }
inline Var softmax_rows(Var x) { return x.tape->softmax_rows(x); }
inline Var leaky_relu(Var x, double alpha) {
  return x.tape->leaky_relu(x, alpha);
}
inline Var euler_to_rotmat(Var e) { return e.tape->euler_to_rotmat(e); }
inline Var blend_rows(Var s, Tensor centers) {
  return s.tape->blend_rows(s, std::move(centers));
}
inline Var pinhole_project(Var p, double focal, double cx, double cy) {
  return p.tape->pinhole_project(p, focal, cx, cy);
}

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

// Compositions used throughout: sums, norms and broadcasts.
inline Var sum_squares(Var x) { return reduce_sum(square(x)); }
inline Var l1_norm(Var x) { return reduce_sum(abs(x)); }
inline Var l2_norm(Var x) { return sqrt(sum_squares(x)); }

// row (1 x d) replicated into n rows via ones(n,1) * row.
inline Var replicate_row(Var row, Eigen::Index n) {
  Var ones = row.tape->constant(Tensor::constant({n, 1}, 1.0));
  return matmul(ones, row);
}

// Mean over all entries.
inline Var mean_all(Var x) {
  return scale(reduce_sum(x),
               1.0 / static_cast<double>(x.tape->value(x).size()));
}

}  // namespace handrec::ad
