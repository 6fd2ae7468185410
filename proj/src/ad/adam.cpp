#include "handrec/ad/adam.hpp"

#include <cmath>

#include "handrec/common/error.hpp"

namespace handrec::ad {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, long step,
               double lr, double beta1, double beta2, double eps) {
  require(param.same_shape(grad), "adam_step: param/grad shape mismatch");
  require(step >= 1, "adam_step: step counts from 1");
  if (state.m.shape != param.shape ||
      state.m.data.size() != param.data.size()) {
    state.m = Tensor::zeros(param.shape);
    state.v = Tensor::zeros(param.shape);
  }
  state.m.data = beta1 * state.m.data + (1.0 - beta1) * grad.data;
  state.v.data = beta2 * state.v.data.array() +
                 (1.0 - beta2) * grad.data.array().square();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  param.data.array() -= lr * (state.m.data.array() / bc1) /
                        ((state.v.data.array() / bc2).sqrt() + eps);
}

int AdamOptimizer::add_group(std::vector<Var> params, double lr) {
  Group g;
  g.params = std::move(params);
  g.states.resize(g.params.size());
  g.lr = lr;
  groups_.push_back(std::move(g));
  return static_cast<int>(groups_.size()) - 1;
}

void AdamOptimizer::set_group_active(int group, bool active) {
  groups_.at(static_cast<size_t>(group)).active = active;
}

void AdamOptimizer::step(double grad_scale) {
  ++step_;
  for (Group& g : groups_) {
    if (!g.active) continue;
    for (size_t i = 0; i < g.params.size(); ++i) {
      Var p = g.params[i];
      Tensor grad = p.tape->grad(p);
      if (grad_scale != 1.0) grad.data *= grad_scale;
      adam_step(p.tape->mutable_value(p), grad, g.states[i], step_, g.lr,
                beta1_, beta2_, eps_);
    }
  }
}

void AdamOptimizer::decay_lr(double factor) {
  for (Group& g : groups_) g.lr *= factor;
}

double AdamOptimizer::group_lr(int group) const {
  return groups_.at(static_cast<size_t>(group)).lr;
}

}  // namespace handrec::ad
