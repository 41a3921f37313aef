// Dense row-major f64 tensors and trainable parameters.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "elcmp/rng.hpp"

namespace elcmp {

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
    v.assign(count(dims), 0.0);
  }
  Tensor(std::vector<std::size_t> d, std::vector<double> data)
      : dims(std::move(d)), v(std::move(data)) {
    if (v.size() != count(dims))
      throw ShapeError("tensor data length " + std::to_string(v.size()) +
                       " does not match dims product " + std::to_string(count(dims)));
  }

  static Tensor zeros(std::vector<std::size_t> d) { return Tensor(std::move(d)); }
  static Tensor vec(std::vector<double> data) {
    std::vector<std::size_t> d{data.size()};
    return Tensor(std::move(d), std::move(data));
  }
  static Tensor scalar(double x) { return Tensor({1}, {x}); }

  std::size_t size() const { return v.size(); }
  std::size_t rows() const { return dims.empty() ? 0 : dims[0]; }
  std::size_t cols() const { return dims.size() < 2 ? 1 : dims[1]; }
  bool is_scalar() const { return v.size() == 1; }

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  double& at(std::size_t r, std::size_t c) { return v[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols() + c]; }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }
  bool all_finite() const;
  bool same_shape(const Tensor& o) const { return dims == o.dims; }

  static std::size_t count(const std::vector<std::size_t>& d) {
    std::size_t n = 1;
    for (auto x : d) n *= x;
    return n;
  }
};

struct Parameter {
  Tensor value;
  Tensor grad;
  std::string name;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> dims)
      : value(dims), grad(std::move(dims)), name(std::move(n)) {}

  std::size_t size() const { return value.size(); }
  void zero_grad() { grad.fill(0.0); }

  // Xavier-uniform over fan_in/fan_out taken from the value dims.
  void init_xavier(Rng& rng) {
    double fan_in = static_cast<double>(value.cols());
    double fan_out = static_cast<double>(value.rows());
    if (value.dims.size() < 2) fan_out = 1.0;  // bias-like: fan over length
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& x : value.v) x = rng.uniform(-bound, bound);
  }
};

}  // namespace elcmp
