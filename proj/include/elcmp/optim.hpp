#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "elcmp/tensor.hpp"

namespace elcmp {

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_norm(std::span<Parameter* const> params, double max_norm);

void sgd_step(std::span<Parameter* const> params, double lr);

// Adam with bias correction; first and second moments persist across steps.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<Parameter* const> params);
  void reset() { m_.clear(); v_.clear(); t_ = 0; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::unordered_map<Parameter*, std::vector<double>> m_, v_;
};

struct OptimizerConfig {
  std::string kind = "sgd";  // sgd | adam
  double lr = 1.0;
  double clip_norm = 5.0;
  double lr_decay = 1.0;  // multiplied into lr after each epoch
};

// Uniform front-end over the two optimizers used by the training loops.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg);
  void step(std::span<Parameter* const> params);
  void end_epoch() { lr_ *= cfg_.lr_decay; }
  double lr() const { return lr_; }

 private:
  OptimizerConfig cfg_;
  double lr_;
  Adam adam_;
};

}  // namespace elcmp
