// Define-by-run reverse-mode differentiation over Tensor values.
//
// Each op appends one node holding the forward value, a zeroed gradient
// buffer and a closure that pushes the node's gradient into its inputs.
// Parameters are leaves: ops that consume a Parameter read its value in
// place and their closures accumulate straight into Parameter::grad, so no
// parameter copies ever land on the tape. Replaying the node list backward
// visits ops in exact reverse topological order (insertion order is a
// topological order by construction).
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "elcmp/tensor.hpp"

namespace elcmp {

class Tape {
 public:
  using Var = int;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // ---- leaves ----
  Var input(Tensor t);
  Var constant(Tensor t) { return input(std::move(t)); }  // grads discarded by caller
  Var lookup(Parameter& table, std::size_t row);

  // ---- affine / structural ----
  Var affine(Var x, Parameter& w, Parameter* b);
  Var concat(std::span<const Var> xs);
  Var concat2(Var a, Var b) { Var t[2] = {a, b}; return concat(t); }
  Var concat3(Var a, Var b, Var c) { Var t[3] = {a, b, c}; return concat(t); }
  Var slice(Var x, std::size_t off, std::size_t len);
  Var pad_to(Var x, std::size_t n);
  // y[bucket[s]] += x[s]; merges slots that map to the same bucket.
  Var scatter_merge(Var x, std::vector<int> bucket, std::size_t n_buckets);

  // ---- elementwise ----
  Var sigmoid(Var x);
  Var tanh_(Var x);
  Var one_minus(Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var ewise_max(Var a, Var b);  // gradient follows the winning side (a on ties)
  Var scale(Var x, Var s);  // s must be scalar
  Var scale_const(Var x, double c);
  Var dropout(Var x, double rate, Rng& rng, bool training);

  // ---- reductions / distributions ----
  Var softmax(Var x);
  Var stack(std::span<const Var> scalars);
  Var blend(Var weights, std::span<const Var> keys);  // sum_i a_i * key_i
  Var sum_scalars(std::span<const Var> scalars);

  // ---- losses ----
  Var neg_log_pick(Var p, std::size_t idx);
  Var ce_with_logits(Var z, std::size_t target);
  Var bce_with_logits(Var z, const Tensor& targets);

  // ---- execution ----
  void backward(Var loss);

  const Tensor& val(Var v) const { return nodes_[v].val; }
  const Tensor& grad(Var v) const { return nodes_[v].grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    std::function<void()> back;
  };

  Var push(Tensor val) {
    Node n;
    n.grad = Tensor(val.dims);
    n.val = std::move(val);
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
};

}  // namespace elcmp
