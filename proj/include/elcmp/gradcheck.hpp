#pragma once

#include <functional>
#include <span>
#include <string>

#include "elcmp/tensor.hpp"

namespace elcmp {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

// Central finite differences against the tape gradients.
//
// `loss` must rebuild the computation from scratch each call (fresh tape);
// when its argument is true it must also backpropagate into the parameters'
// grad buffers. The relative error per element is
//   |g_a - g_fd| / max(|g_a|, |g_fd|, 1e-8)
// where g_fd is the better-conditioned of the difference quotients taken at
// epsilon and at 10*epsilon.
GradCheckResult gradient_check(const std::function<double(bool)>& loss,
                               std::span<Parameter* const> params,
                               double epsilon = 1e-5);

}  // namespace elcmp
