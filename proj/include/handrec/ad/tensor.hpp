#pragma once

#include <Eigen/Core>
#include <vector>

namespace handrec::ad {

using Shape = std::vector<Eigen::Index>;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

// Toggles NaN/Inf rejection when tensors enter a tape (leaves, constants,
// set_value). On by default.
void set_value_checking(bool enabled);
bool value_checking();

// Dense n-dimensional value array, 64-bit floats, flat row-major storage.
// An empty shape denotes a scalar. The 2D view used by matrix ops collapses
// all trailing dimensions into columns, so a {n, L, d} tensor is seen as an
// n x (L*d) matrix without copying.
struct Tensor {
  Eigen::VectorXd data;
  Shape shape;

  Tensor() = default;

  static Tensor zeros(Shape s);
  static Tensor constant(Shape s, double value);
  static Tensor scalar(double value);

  template <typename Derived>
  static Tensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    Tensor t = zeros({m.rows(), m.cols()});
    t.matrix() = m;
    return t;
  }

  static Tensor from_vector(const Eigen::VectorXd& v, Shape s);

  Eigen::Index size() const { return data.size(); }
  Eigen::Index rank() const { return static_cast<Eigen::Index>(shape.size()); }
  Eigen::Index rows() const { return shape.empty() ? 1 : shape[0]; }
  Eigen::Index cols() const { return shape.empty() ? 1 : size() / shape[0]; }

  double value() const;  // scalar tensors only

  MatMap matrix() { return MatMap(data.data(), rows(), cols()); }
  ConstMatMap matrix() const {
    return ConstMatMap(data.data(), rows(), cols());
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

Eigen::Index shape_size(const Shape& s);
std::string shape_str(const Shape& s);

}  // namespace handrec::ad
