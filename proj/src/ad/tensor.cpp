#include "handrec/ad/tensor.hpp"

#include <sstream>

#include "handrec/common/error.hpp"

namespace handrec::ad {

namespace {
bool g_check_values = true;
}

void set_value_checking(bool enabled) { g_check_values = enabled; }
bool value_checking() { return g_check_values; }

Eigen::Index shape_size(const Shape& s) {
  Eigen::Index n = 1;
  for (Eigen::Index d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
  return os.str();
}

Tensor Tensor::zeros(Shape s) {
  Tensor t;
  t.data = Eigen::VectorXd::Zero(shape_size(s));
  t.shape = std::move(s);
  return t;
}

Tensor Tensor::constant(Shape s, double value) {
  Tensor t;
  t.data = Eigen::VectorXd::Constant(shape_size(s), value);
  t.shape = std::move(s);
  return t;
}

Tensor Tensor::scalar(double value) { return constant({}, value); }

Tensor Tensor::from_vector(const Eigen::VectorXd& v, Shape s) {
  require(v.size() == shape_size(s), "vector of size ", v.size(),
          " cannot take shape ", shape_str(s));
  Tensor t;
  t.data = v;
  t.shape = std::move(s);
  return t;
}

double Tensor::value() const {
  require(size() == 1, "value() requires a scalar, got shape ",
          shape_str(shape));
  return data[0];
}

}  // namespace handrec::ad
