#pragma once

#include <vector>

#include "handrec/ad/tape.hpp"

namespace handrec::ad {

struct AdamState {
  Tensor m, v;  // first/second moment estimates, allocated on first step
};

// One Adam update with bias correction. `step` counts from 1.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, long step,
               double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

// Adam over tape leaves with per-group learning rates and multiplicative
// decay. Groups can be deactivated (their parameters and moments stay
// untouched), which is how staged optimization freezes parameter blocks.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  int add_group(std::vector<Var> params, double lr);
  void set_group_active(int group, bool active);

  // Applies one update using the gradients currently on the tape(s);
  // gradients are multiplied by grad_scale first (batch averaging).
  void step(double grad_scale = 1.0);

  void decay_lr(double factor);
  double group_lr(int group) const;
  long step_count() const { return step_; }

 private:
  struct Group {
    std::vector<Var> params;
    std::vector<AdamState> states;
    double lr = 0;
    bool active = true;
  };
  std::vector<Group> groups_;
  double beta1_, beta2_, eps_;
  long step_ = 0;
};

}  // namespace handrec::ad
