#include "elcmp/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace elcmp {

double clip_global_norm(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (auto* p : params)
    for (double g : p->grad.v) sq += g * g;
  double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    double s = max_norm / norm;
    for (auto* p : params)
      for (double& g : p->grad.v) g *= s;
  }
  return norm;
}

void sgd_step(std::span<Parameter* const> params, double lr) {
  for (auto* p : params)
    for (std::size_t i = 0; i < p->value.size(); ++i)
      p->value.v[i] -= lr * p->grad.v[i];
}

void Adam::step(std::span<Parameter* const> params) {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (auto* p : params) {
    auto& m = m_[p];
    auto& v = v_[p];
    if (m.empty()) {
      m.assign(p->value.size(), 0.0);
      v.assign(p->value.size(), 0.0);
    }
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      double g = p->grad.v[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      double mh = m[i] / bc1;
      double vh = v[i] / bc2;
      p->value.v[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
  }
}

Optimizer::Optimizer(OptimizerConfig cfg)
    : cfg_(std::move(cfg)), lr_(cfg_.lr), adam_(cfg_.lr) {
  if (cfg_.kind != "sgd" && cfg_.kind != "adam")
    throw std::runtime_error("unknown optimizer kind: " + cfg_.kind);
}

void Optimizer::step(std::span<Parameter* const> params) {
  if (cfg_.clip_norm > 0.0) clip_global_norm(params, cfg_.clip_norm);
  if (cfg_.kind == "sgd") {
    sgd_step(params, lr_);
  } else {
    adam_.set_lr(lr_);
    adam_.step(params);
  }
}

}  // namespace elcmp
