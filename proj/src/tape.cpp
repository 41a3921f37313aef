#include "elcmp/tape.hpp"

#include <cmath>

#include "elcmp/kernels.hpp"

namespace elcmp {

namespace {
constexpr double kLogFloor = 1e-300;
}

Tape::Var Tape::input(Tensor t) { return push(std::move(t)); }

Tape::Var Tape::lookup(Parameter& table, std::size_t row) {
  std::size_t d = table.value.cols();
  Tensor out({d});
  const double* src = table.value.v.data() + row * d;
  std::copy(src, src + d, out.v.begin());
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, &table, row, d] {
    const Tensor& g = nodes_[y].grad;
    double* dst = table.grad.v.data() + row * d;
    for (std::size_t i = 0; i < d; ++i) dst[i] += g.v[i];
  };
  return y;
}

Tape::Var Tape::affine(Var x, Parameter& w, Parameter* b) {
  const Tensor& xv = nodes_[x].val;
  std::size_t rows = w.value.rows(), cols = w.value.cols();
  if (xv.size() != cols)
    throw ShapeError("affine: input length " + std::to_string(xv.size()) +
                     " does not match weight cols " + std::to_string(cols) +
                     " of " + w.name);
  if (b && b->value.size() != rows)
    throw ShapeError("affine: bias length " + std::to_string(b->value.size()) +
                     " does not match weight rows " + std::to_string(rows) +
                     " of " + w.name);
  Tensor out({rows});
  kernels::gemv(w.value.v.data(), xv.v.data(), b ? b->value.v.data() : nullptr,
                out.v.data(), rows, cols);
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, &w, b, rows, cols] {
    const double* yg = nodes_[y].grad.v.data();
    kernels::gemv_t_acc(w.value.v.data(), yg, nodes_[x].grad.v.data(), rows, cols);
    kernels::ger_acc(yg, nodes_[x].val.v.data(), w.grad.v.data(), rows, cols);
    if (b)
      for (std::size_t i = 0; i < rows; ++i) b->grad.v[i] += yg[i];
  };
  return y;
}

Tape::Var Tape::concat(std::span<const Var> xs) {
  std::size_t total = 0;
  for (Var x : xs) total += nodes_[x].val.size();
  Tensor out({total});
  std::size_t off = 0;
  for (Var x : xs) {
    const Tensor& xv = nodes_[x].val;
    std::copy(xv.v.begin(), xv.v.end(), out.v.begin() + off);
    off += xv.size();
  }
  Var y = push(std::move(out));
  std::vector<Var> parents(xs.begin(), xs.end());
  nodes_[y].back = [this, y, parents = std::move(parents)] {
    const Tensor& g = nodes_[y].grad;
    std::size_t off = 0;
    for (Var x : parents) {
      Tensor& xg = nodes_[x].grad;
      for (std::size_t i = 0; i < xg.size(); ++i) xg.v[i] += g.v[off + i];
      off += xg.size();
    }
  };
  return y;
}

Tape::Var Tape::slice(Var x, std::size_t off, std::size_t len) {
  const Tensor& xv = nodes_[x].val;
  if (off + len > xv.size())
    throw ShapeError("slice: range [" + std::to_string(off) + ", " +
                     std::to_string(off + len) + ") exceeds length " +
                     std::to_string(xv.size()));
  Tensor out({len});
  std::copy(xv.v.begin() + off, xv.v.begin() + off + len, out.v.begin());
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, off, len] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < len; ++i) xg.v[off + i] += g.v[i];
  };
  return y;
}

Tape::Var Tape::pad_to(Var x, std::size_t n) {
  const Tensor& xv = nodes_[x].val;
  if (n < xv.size()) throw ShapeError("pad_to: target shorter than input");
  Tensor out({n});
  std::copy(xv.v.begin(), xv.v.end(), out.v.begin());
  Var y = push(std::move(out));
  std::size_t len = xv.size();
  nodes_[y].back = [this, y, x, len] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < len; ++i) xg.v[i] += g.v[i];
  };
  return y;
}

Tape::Var Tape::scatter_merge(Var x, std::vector<int> bucket, std::size_t n_buckets) {
  const Tensor& xv = nodes_[x].val;
  if (bucket.size() != xv.size())
    throw ShapeError("scatter_merge: bucket map length mismatch");
  Tensor out({n_buckets});
  for (std::size_t s = 0; s < xv.size(); ++s) out.v[bucket[s]] += xv.v[s];
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, bucket = std::move(bucket)] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t s = 0; s < xg.size(); ++s) xg.v[s] += g.v[bucket[s]];
  };
  return y;
}

Tape::Var Tape::sigmoid(Var x) {
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[i] = 1.0 / (1.0 + std::exp(-nodes_[x].val.v[i]));
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& yv = nodes_[y].val;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < g.size(); ++i)
      xg.v[i] += g.v[i] * yv.v[i] * (1.0 - yv.v[i]);
  };
  return y;
}

Tape::Var Tape::tanh_(Var x) {
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = std::tanh(nodes_[x].val.v[i]);
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& yv = nodes_[y].val;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < g.size(); ++i)
      xg.v[i] += g.v[i] * (1.0 - yv.v[i] * yv.v[i]);
  };
  return y;
}

Tape::Var Tape::one_minus(Var x) {
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = 1.0 - nodes_[x].val.v[i];
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < g.size(); ++i) xg.v[i] -= g.v[i];
  };
  return y;
}

Tape::Var Tape::add(Var a, Var b) {
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (!av.same_shape(bv)) throw ShapeError("add: shape mismatch");
  Tensor out(av.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = av.v[i] + bv.v[i];
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, a, b] {
    const Tensor& g = nodes_[y].grad;
    Tensor& ag = nodes_[a].grad;
    Tensor& bg = nodes_[b].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ag.v[i] += g.v[i];
      bg.v[i] += g.v[i];
    }
  };
  return y;
}

Tape::Var Tape::mul(Var a, Var b) {
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (!av.same_shape(bv)) throw ShapeError("mul: shape mismatch");
  Tensor out(av.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = av.v[i] * bv.v[i];
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, a, b] {
    const Tensor& g = nodes_[y].grad;
    Tensor& ag = nodes_[a].grad;
    Tensor& bg = nodes_[b].grad;
    const Tensor& av = nodes_[a].val;
    const Tensor& bv = nodes_[b].val;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ag.v[i] += g.v[i] * bv.v[i];
      bg.v[i] += g.v[i] * av.v[i];
    }
  };
  return y;
}

Tape::Var Tape::ewise_max(Var a, Var b) {
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (!av.same_shape(bv)) throw ShapeError("ewise_max: shape mismatch");
  Tensor out(av.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = std::max(av.v[i], bv.v[i]);
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, a, b] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& av = nodes_[a].val;
    const Tensor& bv = nodes_[b].val;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (av.v[i] >= bv.v[i])
        nodes_[a].grad.v[i] += g.v[i];
      else
        nodes_[b].grad.v[i] += g.v[i];
    }
  };
  return y;
}

Tape::Var Tape::scale(Var x, Var s) {
  if (!nodes_[s].val.is_scalar()) throw ShapeError("scale: scale factor must be scalar");
  double sv = nodes_[s].val.v[0];
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = nodes_[x].val.v[i] * sv;
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, s] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& xv = nodes_[x].val;
    double sv = nodes_[s].val.v[0];
    Tensor& xg = nodes_[x].grad;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      xg.v[i] += g.v[i] * sv;
      acc += g.v[i] * xv.v[i];
    }
    nodes_[s].grad.v[0] += acc;
  };
  return y;
}

Tape::Var Tape::scale_const(Var x, double c) {
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = nodes_[x].val.v[i] * c;
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, c] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < g.size(); ++i) xg.v[i] += g.v[i] * c;
  };
  return y;
}

Tape::Var Tape::dropout(Var x, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return x;
  double keep = 1.0 - rate;
  std::vector<double> mask(nodes_[x].val.size());
  for (auto& m : mask) m = rng.next_double() < rate ? 0.0 : 1.0 / keep;
  Tensor out(nodes_[x].val.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = nodes_[x].val.v[i] * mask[i];
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x, mask = std::move(mask)] {
    const Tensor& g = nodes_[y].grad;
    Tensor& xg = nodes_[x].grad;
    for (std::size_t i = 0; i < g.size(); ++i) xg.v[i] += g.v[i] * mask[i];
  };
  return y;
}

Tape::Var Tape::softmax(Var x) {
  const Tensor& xv = nodes_[x].val;
  Tensor out(xv.dims);
  double mx = xv.v[0];
  for (double t : xv.v) mx = std::max(mx, t);
  double z = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out.v[i] = std::exp(xv.v[i] - mx);
    z += out.v[i];
  }
  for (auto& t : out.v) t /= z;
  Var y = push(std::move(out));
  nodes_[y].back = [this, y, x] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& yv = nodes_[y].val;
    Tensor& xg = nodes_[x].grad;
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g.v[i] * yv.v[i];
    for (std::size_t i = 0; i < g.size(); ++i) xg.v[i] += yv.v[i] * (g.v[i] - dot);
  };
  return y;
}

Tape::Var Tape::stack(std::span<const Var> scalars) {
  Tensor out({scalars.size()});
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (!nodes_[scalars[i]].val.is_scalar()) throw ShapeError("stack: inputs must be scalars");
    out.v[i] = nodes_[scalars[i]].val.v[0];
  }
  Var y = push(std::move(out));
  std::vector<Var> parents(scalars.begin(), scalars.end());
  nodes_[y].back = [this, y, parents = std::move(parents)] {
    const Tensor& g = nodes_[y].grad;
    for (std::size_t i = 0; i < parents.size(); ++i)
      nodes_[parents[i]].grad.v[0] += g.v[i];
  };
  return y;
}

Tape::Var Tape::blend(Var weights, std::span<const Var> keys) {
  const Tensor& wv = nodes_[weights].val;
  if (wv.size() != keys.size()) throw ShapeError("blend: weight/key count mismatch");
  if (keys.empty()) throw ShapeError("blend: empty key set");
  Tensor out(nodes_[keys[0]].val.dims);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const Tensor& kv = nodes_[keys[i]].val;
    for (std::size_t d = 0; d < out.size(); ++d) out.v[d] += wv.v[i] * kv.v[d];
  }
  Var y = push(std::move(out));
  std::vector<Var> parents(keys.begin(), keys.end());
  nodes_[y].back = [this, y, weights, parents = std::move(parents)] {
    const Tensor& g = nodes_[y].grad;
    const Tensor& wv = nodes_[weights].val;
    Tensor& wg = nodes_[weights].grad;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const Tensor& kv = nodes_[parents[i]].val;
      Tensor& kg = nodes_[parents[i]].grad;
      double acc = 0.0;
      for (std::size_t d = 0; d < g.size(); ++d) {
        acc += g.v[d] * kv.v[d];
        kg.v[d] += g.v[d] * wv.v[i];
      }
      wg.v[i] += acc;
    }
  };
  return y;
}

Tape::Var Tape::sum_scalars(std::span<const Var> scalars) {
  double acc = 0.0;
  for (Var s : scalars) {
    if (!nodes_[s].val.is_scalar()) throw ShapeError("sum_scalars: inputs must be scalars");
    acc += nodes_[s].val.v[0];
  }
  Var y = push(Tensor::scalar(acc));
  std::vector<Var> parents(scalars.begin(), scalars.end());
  nodes_[y].back = [this, y, parents = std::move(parents)] {
    double g = nodes_[y].grad.v[0];
    for (Var s : parents) nodes_[s].grad.v[0] += g;
  };
  return y;
}

Tape::Var Tape::neg_log_pick(Var p, std::size_t idx) {
  const Tensor& pv = nodes_[p].val;
  if (idx >= pv.size()) throw ShapeError("neg_log_pick: index out of range");
  double x = std::max(pv.v[idx], kLogFloor);
  Var y = push(Tensor::scalar(-std::log(x)));
  nodes_[y].back = [this, y, p, idx] {
    double x = std::max(nodes_[p].val.v[idx], kLogFloor);
    nodes_[p].grad.v[idx] -= nodes_[y].grad.v[0] / x;
  };
  return y;
}

Tape::Var Tape::ce_with_logits(Var z, std::size_t target) {
  const Tensor& zv = nodes_[z].val;
  if (target >= zv.size()) throw ShapeError("ce_with_logits: target out of range");
  double mx = zv.v[0];
  for (double t : zv.v) mx = std::max(mx, t);
  double sum = 0.0;
  for (double t : zv.v) sum += std::exp(t - mx);
  double lse = mx + std::log(sum);
  Var y = push(Tensor::scalar(lse - zv.v[target]));
  nodes_[y].back = [this, y, z, target, mx, sum] {
    double g = nodes_[y].grad.v[0];
    const Tensor& zv = nodes_[z].val;
    Tensor& zg = nodes_[z].grad;
    for (std::size_t i = 0; i < zv.size(); ++i) {
      double soft = std::exp(zv.v[i] - mx) / sum;
      zg.v[i] += g * (soft - (i == target ? 1.0 : 0.0));
    }
  };
  return y;
}

Tape::Var Tape::bce_with_logits(Var z, const Tensor& targets) {
  const Tensor& zv = nodes_[z].val;
  if (!zv.same_shape(targets)) throw ShapeError("bce_with_logits: target shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < zv.size(); ++i) {
    double x = zv.v[i], t = targets.v[i];
    loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
  }
  Var y = push(Tensor::scalar(loss));
  nodes_[y].back = [this, y, z, targets] {
    double g = nodes_[y].grad.v[0];
    const Tensor& zv = nodes_[z].val;
    Tensor& zg = nodes_[z].grad;
    for (std::size_t i = 0; i < zv.size(); ++i) {
      double sig = 1.0 / (1.0 + std::exp(-zv.v[i]));
      zg.v[i] += g * (sig - targets.v[i]);
    }
  };
  return y;
}

void Tape::backward(Var loss) {
  if (!nodes_[loss].val.is_scalar())
    throw ShapeError("backward: loss must be scalar, got size " +
                     std::to_string(nodes_[loss].val.size()));
  nodes_[loss].grad.v[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;)
    if (nodes_[i].back) nodes_[i].back();
}

}  // namespace elcmp
