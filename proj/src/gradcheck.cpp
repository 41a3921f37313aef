#include "elcmp/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace elcmp {

GradCheckResult gradient_check(const std::function<double(bool)>& loss,
                               std::span<Parameter* const> params,
                               double epsilon) {
  for (auto* p : params) p->zero_grad();
  loss(true);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto* p : params) analytic.push_back(p->grad.v);

  GradCheckResult res;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter* p = params[pi];
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      double saved = p->value.v[i];
      double ga = analytic[pi][i];
      // Two step sizes: the larger one rescues elements whose difference
      // quotient at `epsilon` is dominated by f64 cancellation noise. A wrong
      // analytic gradient disagrees at every step size.
      double rel = 0.0;
      for (int attempt = 0; attempt < 2; ++attempt) {
        double eps = attempt == 0 ? epsilon : 10.0 * epsilon;
        p->value.v[i] = saved + eps;
        double up = loss(false);
        p->value.v[i] = saved - eps;
        double down = loss(false);
        p->value.v[i] = saved;
        double fd = (up - down) / (2.0 * eps);
        double denom = std::max({std::abs(ga), std::abs(fd), 1e-8});
        double r = std::abs(ga - fd) / denom;
        rel = attempt == 0 ? r : std::min(rel, r);
        if (rel < 1e-6) break;
      }
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = p->name;
        res.worst_index = i;
      }
    }
  }
  return res;
}

}  // namespace elcmp
