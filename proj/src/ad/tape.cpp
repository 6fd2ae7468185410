#include "handrec/ad/tape.hpp"

#include <cmath>

#include "handrec/common/error.hpp"

namespace handrec::ad {

namespace {

void check_finite(const Tensor& t, const char* what) {
  if (value_checking())
    require(t.data.allFinite(), what, ": tensor contains NaN/Inf");
}

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}
Eigen::Matrix3d drot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return m;
}
Eigen::Matrix3d rot_y(double b) {
  const double c = std::cos(b), s = std::sin(b);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}
Eigen::Matrix3d drot_y(double b) {
  const double c = std::cos(b), s = std::sin(b);
  Eigen::Matrix3d m;
  m << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return m;
}
Eigen::Matrix3d rot_z(double c) {
  const double co = std::cos(c), si = std::sin(c);
  Eigen::Matrix3d m;
  m << co, -si, 0, si, co, 0, 0, 0, 1;
  return m;
}
Eigen::Matrix3d drot_z(double c) {
  const double co = std::cos(c), si = std::sin(c);
  Eigen::Matrix3d m;
  m << -si, -co, 0, co, -si, 0, 0, 0, 0;
  return m;
}

}  // namespace

Var Tape::emplace(Tensor value, std::vector<int> parents,
                  std::function<void(Tape&, int)> fwd,
                  std::function<void(Tape&, int)> bwd) {
  Node n;
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.fwd = std::move(fwd);
  n.bwd = std::move(bwd);
  for (int p : n.parents)
    n.requires_grad = n.requires_grad || nodes_[static_cast<size_t>(p)].requires_grad;
  nodes_.push_back(std::move(n));
  grads_valid_ = false;
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  require(v.tape == this && v.id >= 0 && v.id < n_nodes(),
          "Var does not belong to this tape");
  return nodes_[static_cast<size_t>(v.id)];
}

Var Tape::leaf(Tensor value) {
  check_finite(value, "leaf");
  Var v = emplace(std::move(value), {}, nullptr, nullptr);
  nodes_.back().requires_grad = true;
  return v;
}

Var Tape::constant(Tensor value) {
  check_finite(value, "constant");
  return emplace(std::move(value), {}, nullptr, nullptr);
}

void Tape::set_value(Var v, Tensor value) {
  node(v);  // ownership + range check
  Node& n = nodes_[static_cast<size_t>(v.id)];
  require(!n.fwd, "set_value is only valid on leaves/constants");
  require(n.value.shape == value.shape, "set_value: shape mismatch, have ",
          shape_str(n.value.shape), " got ", shape_str(value.shape));
  check_finite(value, "set_value");
  n.value = std::move(value);
}

Tensor& Tape::mutable_value(Var v) {
  node(v);  // ownership + range check
  Node& n = nodes_[static_cast<size_t>(v.id)];
  require(!n.fwd, "mutable_value is only valid on leaves/constants");
  return n.value;
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

const Tensor& Tape::grad(Var v) const {
  require(grads_valid_, "grad() called before backward()");
  return node(v).grad;
}

void Tape::forward() {
  for (int i = 0; i < n_nodes(); ++i)
    if (nodes_[static_cast<size_t>(i)].fwd)
      nodes_[static_cast<size_t>(i)].fwd(*this, i);
}

void Tape::backward(Var root) {
  const Node& r = node(root);
  require(r.value.size() == 1,
          "backward() requires a scalar root, got shape ",
          shape_str(r.value.shape));
  for (Node& n : nodes_) {
    if (n.grad.shape != n.value.shape ||
        n.grad.data.size() != n.value.data.size())
      n.grad = Tensor::zeros(n.value.shape);
    else
      n.grad.data.setZero();
  }
  nodes_[static_cast<size_t>(root.id)].grad.data.setConstant(1.0);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.bwd && n.requires_grad) n.bwd(*this, i);
  }
  grads_valid_ = true;
}

// --- elementwise ----------------------------------------------------------

Var Tape::add(Var a, Var b) {
  require(node(a).value.same_shape(node(b).value), "add: shape mismatch ",
          shape_str(node(a).value.shape), " vs ", shape_str(node(b).value.shape));
  Tensor out = Tensor::zeros(node(a).value.shape);
  return emplace(
      std::move(out), {a.id, b.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data +
                       t.node_at(n.parents[1]).value.data;
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data += n.grad.data;
        t.node_at(n.parents[1]).grad.data += n.grad.data;
      });
}

Var Tape::sub(Var a, Var b) {
  require(node(a).value.same_shape(node(b).value), "sub: shape mismatch ",
          shape_str(node(a).value.shape), " vs ", shape_str(node(b).value.shape));
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id, b.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data -
                       t.node_at(n.parents[1]).value.data;
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data += n.grad.data;
        t.node_at(n.parents[1]).grad.data -= n.grad.data;
      });
}

Var Tape::mul(Var a, Var b) {
  require(node(a).value.same_shape(node(b).value), "mul: shape mismatch ",
          shape_str(node(a).value.shape), " vs ", shape_str(node(b).value.shape));
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id, b.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.cwiseProduct(
            t.node_at(n.parents[1]).value.data);
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto& b = t.node_at(n.parents[1]);
        a.grad.data += n.grad.data.cwiseProduct(b.value.data);
        b.grad.data += n.grad.data.cwiseProduct(a.value.data);
      });
}

Var Tape::div(Var a, Var b) {
  require(node(a).value.same_shape(node(b).value), "div: shape mismatch ",
          shape_str(node(a).value.shape), " vs ", shape_str(node(b).value.shape));
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id, b.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.cwiseQuotient(
            t.node_at(n.parents[1]).value.data);
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto& b = t.node_at(n.parents[1]);
        a.grad.data += n.grad.data.cwiseQuotient(b.value.data);
        b.grad.data -= n.grad.data.cwiseProduct(n.value.data)
                           .cwiseQuotient(b.value.data);
      });
}

Var Tape::scale(Var a, double c) {
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id},
      [c](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = c * t.node_at(n.parents[0]).value.data;
      },
      [c](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data += c * n.grad.data;
      });
}

Var Tape::add_scalar(Var a, double c) {
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id},
      [c](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.array() + c;
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data += n.grad.data;
      });
}

Var Tape::scalar_mul(Var a, Var s) {
  require(node(s).value.size() == 1, "scalar_mul: s must be scalar");
  return emplace(
      Tensor::zeros(node(a).value.shape), {a.id, s.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[1]).value.data[0] *
                       t.node_at(n.parents[0]).value.data;
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto& s = t.node_at(n.parents[1]);
        a.grad.data += s.value.data[0] * n.grad.data;
        s.grad.data[0] += n.grad.data.dot(a.value.data);
      });
}

// --- linear algebra ---------------------------------------------------------

Var Tape::matmul(Var a, Var b) {
  const auto& av = node(a).value;
  const auto& bv = node(b).value;
  require(av.cols() == bv.rows(), "matmul: inner dims ", av.cols(), " vs ",
          bv.rows());
  return emplace(
      Tensor::zeros({av.rows(), bv.cols()}), {a.id, b.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.matrix().noalias() = t.node_at(n.parents[0]).value.matrix() *
                                     t.node_at(n.parents[1]).value.matrix();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto& b = t.node_at(n.parents[1]);
        a.grad.matrix().noalias() +=
            n.grad.matrix() * b.value.matrix().transpose();
        b.grad.matrix().noalias() +=
            a.value.matrix().transpose() * n.grad.matrix();
      });
}

Var Tape::sparse_matmul(std::shared_ptr<const SparseMat> s, Var x) {
  require(s != nullptr, "sparse_matmul: null matrix");
  const auto& xv = node(x).value;
  require(s->cols() == xv.rows(), "sparse_matmul: inner dims ", s->cols(),
          " vs ", xv.rows());
  return emplace(
      Tensor::zeros({s->rows(), xv.cols()}), {x.id},
      [s](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.matrix() = (*s) * t.node_at(n.parents[0]).value.matrix();
      },
      [s](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.matrix() +=
            s->transpose() * n.grad.matrix();
      });
}

Var Tape::gather_rows(Var x, std::vector<int> idx) {
  const auto& xv = node(x).value;
  auto indices = std::make_shared<const std::vector<int>>(std::move(idx));
  for (int i : *indices)
    require(i == -1 || (i >= 0 && i < xv.rows()), "gather_rows: index ", i,
            " out of range [0, ", xv.rows(), ")");
  const Eigen::Index m = static_cast<Eigen::Index>(indices->size());
  return emplace(
      Tensor::zeros({m, xv.cols()}), {x.id},
      [indices](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto src = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        for (Eigen::Index i = 0; i < dst.rows(); ++i) {
          const int j = (*indices)[static_cast<size_t>(i)];
          if (j >= 0) dst.row(i) = src.row(j);
          else dst.row(i).setZero();
        }
      },
      [indices](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto dst = t.node_at(n.parents[0]).grad.matrix();
        auto g = n.grad.matrix();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          const int j = (*indices)[static_cast<size_t>(i)];
          if (j >= 0) dst.row(j) += g.row(i);
        }
      });
}

Var Tape::gather_cols(Var x, std::vector<int> idx) {
  const auto& xv = node(x).value;
  auto indices = std::make_shared<const std::vector<int>>(std::move(idx));
  for (int i : *indices)
    require(i >= 0 && i < xv.cols(), "gather_cols: index ", i,
            " out of range [0, ", xv.cols(), ")");
  const Eigen::Index m = static_cast<Eigen::Index>(indices->size());
  return emplace(
      Tensor::zeros({xv.rows(), m}), {x.id},
      [indices](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto src = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        for (size_t i = 0; i < indices->size(); ++i)
          dst.col(static_cast<Eigen::Index>(i)) = src.col((*indices)[i]);
      },
      [indices](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto dst = t.node_at(n.parents[0]).grad.matrix();
        auto g = n.grad.matrix();
        for (size_t i = 0; i < indices->size(); ++i)
          dst.col((*indices)[i]) += g.col(static_cast<Eigen::Index>(i));
      });
}

Var Tape::concat_rows(const std::vector<Var>& xs) {
  require(!xs.empty(), "concat_rows: empty input");
  std::vector<int> parents;
  Eigen::Index rows = 0;
  const Eigen::Index cols = node(xs[0]).value.cols();
  for (Var x : xs) {
    require(node(x).value.cols() == cols, "concat_rows: column mismatch");
    rows += node(x).value.rows();
    parents.push_back(x.id);
  }
  return emplace(
      Tensor::zeros({rows, cols}), std::move(parents),
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto dst = n.value.matrix();
        Eigen::Index r = 0;
        for (int p : n.parents) {
          auto src = t.node_at(p).value.matrix();
          dst.middleRows(r, src.rows()) = src;
          r += src.rows();
        }
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto g = n.grad.matrix();
        Eigen::Index r = 0;
        for (int p : n.parents) {
          auto dst = t.node_at(p).grad.matrix();
          dst += g.middleRows(r, dst.rows());
          r += dst.rows();
        }
      });
}

Var Tape::concat_cols(const std::vector<Var>& xs) {
  require(!xs.empty(), "concat_cols: empty input");
  std::vector<int> parents;
  Eigen::Index cols = 0;
  const Eigen::Index rows = node(xs[0]).value.rows();
  for (Var x : xs) {
    require(node(x).value.rows() == rows, "concat_cols: row mismatch");
    cols += node(x).value.cols();
    parents.push_back(x.id);
  }
  return emplace(
      Tensor::zeros({rows, cols}), std::move(parents),
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto dst = n.value.matrix();
        Eigen::Index c = 0;
        for (int p : n.parents) {
          auto src = t.node_at(p).value.matrix();
          dst.middleCols(c, src.cols()) = src;
          c += src.cols();
        }
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto g = n.grad.matrix();
        Eigen::Index c = 0;
        for (int p : n.parents) {
          auto dst = t.node_at(p).grad.matrix();
          dst += g.middleCols(c, dst.cols());
          c += dst.cols();
        }
      });
}

Var Tape::transpose(Var x) {
  const auto& xv = node(x).value;
  return emplace(
      Tensor::zeros({xv.cols(), xv.rows()}), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.matrix() = t.node_at(n.parents[0]).value.matrix().transpose();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.matrix() += n.grad.matrix().transpose();
      });
}

Var Tape::reshape(Var x, Shape s) {
  require(shape_size(s) == node(x).value.size(), "reshape: size mismatch");
  return emplace(
      Tensor::zeros(std::move(s)), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data;
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data += n.grad.data;
      });
}

// --- reductions and nonlinearities ------------------------------------------

Var Tape::reduce_sum(Var x) {
  return emplace(
      Tensor::zeros({}), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data[0] = t.node_at(n.parents[0]).value.data.sum();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        t.node_at(n.parents[0]).grad.data.array() += n.grad.data[0];
      });
}

Var Tape::square(Var x) {
  return emplace(
      Tensor::zeros(node(x).value.shape), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.array().square();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        a.grad.data += 2.0 * n.grad.data.cwiseProduct(a.value.data);
      });
}

Var Tape::sqrt(Var x) {
  return emplace(
      Tensor::zeros(node(x).value.shape), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.array().sqrt();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        for (Eigen::Index i = 0; i < n.value.size(); ++i)
          if (n.value.data[i] > 0.0)
            a.grad.data[i] += 0.5 * n.grad.data[i] / n.value.data[i];
      });
}

Var Tape::abs(Var x) {
  return emplace(
      Tensor::zeros(node(x).value.shape), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.data.array().abs();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        a.grad.data += n.grad.data.cwiseProduct(
            a.value.data.array().sign().matrix());
      });
}

Var Tape::row_norms(Var x) {
  const auto& xv = node(x).value;
  return emplace(
      Tensor::zeros({xv.rows(), 1}), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        n.value.data = t.node_at(n.parents[0]).value.matrix().rowwise().norm();
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto am = a.value.matrix();
        auto gm = a.grad.matrix();
        for (Eigen::Index i = 0; i < n.value.size(); ++i) {
          const double norm = n.value.data[i];
          if (norm > 1e-300)
            gm.row(i) += (n.grad.data[i] / norm) * am.row(i);
        }
      });
}

Var Tape::softmax_rows(Var x) {
  require(node(x).value.cols() > 0, "softmax_rows: empty rows");
  return emplace(
      Tensor::zeros(node(x).value.shape), {x.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto src = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        for (Eigen::Index i = 0; i < src.rows(); ++i) {
          const double m = src.row(i).maxCoeff();
          dst.row(i) = (src.row(i).array() - m).exp();
          dst.row(i) /= dst.row(i).sum();
        }
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto s = n.value.matrix();
        auto g = n.grad.matrix();
        auto dst = t.node_at(n.parents[0]).grad.matrix();
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
          const double dot = g.row(i).dot(s.row(i));
          dst.row(i) +=
              (s.row(i).array() * (g.row(i).array() - dot)).matrix();
        }
      });
}

Var Tape::leaky_relu(Var x, double alpha) {
  return emplace(
      Tensor::zeros(node(x).value.shape), {x.id},
      [alpha](Tape& t, int id) {
        auto& n = t.node_at(id);
        const auto& src = t.node_at(n.parents[0]).value.data;
        n.value.data =
            src.array().max(0.0) + alpha * src.array().min(0.0);
      },
      [alpha](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        a.grad.data.array() +=
            n.grad.data.array() *
            (a.value.data.array() > 0.0).select(
                Eigen::ArrayXd::Ones(a.value.size()),
                Eigen::ArrayXd::Constant(a.value.size(), alpha));
      });
}

Var Tape::euler_to_rotmat(Var euler) {
  const auto& ev = node(euler).value;
  require(ev.cols() == 3, "euler_to_rotmat: expected n x 3 input");
  const Eigen::Index n_rows = ev.rows();
  return emplace(
      Tensor::zeros({n_rows, 3, 3}), {euler.id},
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto ang = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        for (Eigen::Index i = 0; i < ang.rows(); ++i) {
          const Eigen::Matrix3d r =
              rot_x(ang(i, 0)) * rot_y(ang(i, 1)) * rot_z(ang(i, 2));
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) dst(i, 3 * a + b) = r(a, b);
        }
      },
      [](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& e = t.node_at(n.parents[0]);
        auto ang = e.value.matrix();
        auto gsrc = n.grad.matrix();
        auto gdst = e.grad.matrix();
        for (Eigen::Index i = 0; i < ang.rows(); ++i) {
          Eigen::Matrix3d g;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) g(a, b) = gsrc(i, 3 * a + b);
          const Eigen::Matrix3d rx = rot_x(ang(i, 0));
          const Eigen::Matrix3d ry = rot_y(ang(i, 1));
          const Eigen::Matrix3d rz = rot_z(ang(i, 2));
          gdst(i, 0) += (drot_x(ang(i, 0)) * ry * rz).cwiseProduct(g).sum();
          gdst(i, 1) += (rx * drot_y(ang(i, 1)) * rz).cwiseProduct(g).sum();
          gdst(i, 2) += (rx * ry * drot_z(ang(i, 2))).cwiseProduct(g).sum();
        }
      });
}

Var Tape::blend_rows(Var s, Tensor centers) {
  const auto& sv = node(s).value;
  require(centers.rank() == 3 && centers.shape[0] == sv.rows() &&
              centers.shape[1] == sv.cols(),
          "blend_rows: centers shape ", shape_str(centers.shape),
          " does not match weights ", shape_str(sv.shape));
  const Eigen::Index d = centers.shape[2];
  auto c = std::make_shared<const Tensor>(std::move(centers));
  return emplace(
      Tensor::zeros({sv.rows(), d}), {s.id},
      [c, d](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto w = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        dst.setZero();
        const Eigen::Index C = w.cols();
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          ConstMatMap ci(c->data.data() + i * C * d, C, d);
          dst.row(i) = w.row(i) * ci;
        }
      },
      [c, d](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& s = t.node_at(n.parents[0]);
        auto g = n.grad.matrix();
        auto gw = s.grad.matrix();
        const Eigen::Index C = s.value.cols();
        for (Eigen::Index i = 0; i < gw.rows(); ++i) {
          ConstMatMap ci(c->data.data() + i * C * d, C, d);
          gw.row(i) += g.row(i) * ci.transpose();
        }
      });
}

Var Tape::pinhole_project(Var points, double focal, double cx, double cy) {
  const auto& pv = node(points).value;
  require(pv.cols() == 3, "pinhole_project: expected m x 3 points");
  return emplace(
      Tensor::zeros({pv.rows(), 2}), {points.id},
      [focal, cx, cy](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto p = t.node_at(n.parents[0]).value.matrix();
        auto dst = n.value.matrix();
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
          const double z = p(i, 2);
          require(z > 0.0, "pinhole_project: point ", i, " has depth ", z,
                  " <= 0 (behind the camera)");
          dst(i, 0) = focal * p(i, 0) / z + cx;
          dst(i, 1) = focal * p(i, 1) / z + cy;
        }
      },
      [focal](Tape& t, int id) {
        auto& n = t.node_at(id);
        auto& a = t.node_at(n.parents[0]);
        auto p = a.value.matrix();
        auto gp = a.grad.matrix();
        auto g = n.grad.matrix();
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
          const double z = p(i, 2);
          gp(i, 0) += g(i, 0) * focal / z;
          gp(i, 1) += g(i, 1) * focal / z;
          gp(i, 2) -= focal * (g(i, 0) * p(i, 0) + g(i, 1) * p(i, 1)) / (z * z);
        }
      });
}

}  // namespace handrec::ad
