#include "elcmp/tensor.hpp"

#include <cmath>

namespace elcmp {

bool Tensor::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace elcmp
