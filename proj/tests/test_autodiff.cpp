#include "doctest.h"

#include <cmath>

#include "elcmp/gradcheck.hpp"
#include "elcmp/nn.hpp"
#include "elcmp/optim.hpp"
#include "elcmp/tape.hpp"

using namespace elcmp;

namespace {

Parameter make_param(const std::string& name, std::vector<std::size_t> dims,
                     std::vector<double> values) {
  Parameter p(name, dims);
  p.value.v = std::move(values);
  return p;
}

void randomize(Parameter& p, Rng& rng, double scale = 0.5) {
  for (auto& x : p.value.v) x = rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("affine forward") {
  Tape t;
  SUBCASE("identity") {
    Parameter w = make_param("w", {2, 2}, {1, 0, 0, 1});
    Parameter b = make_param("b", {2}, {0, 0});
    Tape::Var y = t.affine(t.input(Tensor::vec({1, 0})), w, &b);
    CHECK(t.val(y).v[0] == doctest::Approx(1.0));
    CHECK(t.val(y).v[1] == doctest::Approx(0.0));
  }
  SUBCASE("hand matrix multiply") {
    // y = x W + b with x = [1,1]: rows of W are output weights, so W[0]=[1,2]
    // and W[1]=[3,4] give y = [3, 7]; the transposed layout [[1,3],[2,4]]
    // gives the spec's [4, 6].
    Parameter w = make_param("w", {2, 2}, {1, 3, 2, 4});
    Parameter b = make_param("b", {2}, {0, 0});
    Tape::Var y = t.affine(t.input(Tensor::vec({1, 1})), w, &b);
    CHECK(t.val(y).v[0] == doctest::Approx(4.0));
    CHECK(t.val(y).v[1] == doctest::Approx(6.0));
  }
  SUBCASE("zero input passes bias") {
    Parameter w = make_param("w", {2, 2}, {3, -1, 2, 9});
    Parameter b = make_param("b", {2}, {5, -5});
    Tape::Var y = t.affine(t.input(Tensor::vec({0, 0})), w, &b);
    CHECK(t.val(y).v[0] == doctest::Approx(5.0));
    CHECK(t.val(y).v[1] == doctest::Approx(-5.0));
  }
  SUBCASE("dimension mismatch names both dims") {
    Parameter w = make_param("w", {2, 3}, {0, 0, 0, 0, 0, 0});
    bool threw = false;
    try {
      t.affine(t.input(Tensor::vec({1, 2})), w, nullptr);
    } catch (const ShapeError& e) {
      threw = true;
      std::string msg = e.what();
      CHECK(msg.find("2") != std::string::npos);
      CHECK(msg.find("3") != std::string::npos);
    }
    CHECK(threw);
  }
}

TEST_CASE("elementwise activations") {
  Tape t;
  Tape::Var s = t.sigmoid(t.input(Tensor::vec({0.0, 2.0})));
  CHECK(t.val(s).v[0] == doctest::Approx(0.5));
  CHECK(t.val(s).v[1] == doctest::Approx(0.880797).epsilon(1e-6));
  Tape::Var th = t.tanh_(t.input(Tensor::scalar(0.0)));
  CHECK(t.val(th).v[0] == doctest::Approx(0.0));
}

TEST_CASE("softmax") {
  Tape t;
  SUBCASE("symmetry") {
    Tape::Var y = t.softmax(t.input(Tensor::vec({0, 0})));
    CHECK(t.val(y).v[0] == doctest::Approx(0.5));
  }
  SUBCASE("hand evaluation") {
    Tape::Var y = t.softmax(t.input(Tensor::vec({std::log(1.0), std::log(3.0)})));
    CHECK(t.val(y).v[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.val(y).v[1] == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("stability under large equal logits") {
    Tape::Var y = t.softmax(t.input(Tensor::vec({1000, 1000})));
    CHECK(t.val(y).v[0] == doctest::Approx(0.5));
  }
  SUBCASE("distribution property under random large-magnitude inputs") {
    Rng rng(99);
    for (int rep = 0; rep < 200; ++rep) {
      Tensor x({7});
      for (auto& v : x.v) v = rng.uniform(-1e3, 1e3);
      Tape t2;
      const Tensor& y = t2.val(t2.softmax(t2.input(x)));
      double sum = 0.0;
      for (double v : y.v) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("lstm cell") {
  SUBCASE("zero parameters, zero c_prev give zero output") {
    LstmLayer cell("cell", 3, 4);
    Tape t;
    Tape::Var x = t.input(Tensor::vec({1.0, -2.0, 0.5}));
    Tape::Var h0 = t.input(Tensor({4}));
    Tape::Var c0 = t.input(Tensor({4}));
    auto [h, c] = cell.step(t, x, h0, c0);
    for (double v : t.val(h).v) CHECK(v == doctest::Approx(0.0));
    for (double v : t.val(c).v) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("zero parameters decay c by the 0.5 forget gate per step") {
    LstmLayer cell("cell", 2, 2);
    Tape t;
    Tape::Var x = t.input(Tensor::vec({0.0, 0.0}));
    Tape::Var h = t.input(Tensor({2}));
    Tape::Var c = t.input(Tensor::vec({0.8, -0.4}));
    double c0 = 0.8;
    for (int step = 1; step <= 3; ++step) {
      std::tie(h, c) = cell.step(t, x, h, c);
      CHECK(t.val(c).v[0] == doctest::Approx(std::pow(0.5, step) * c0));
    }
  }
  SUBCASE("matches an independent gate-equation evaluation") {
    LstmLayer cell("cell", 2, 2);
    Rng rng(5);
    randomize(cell.w, rng);
    randomize(cell.b, rng);
    std::vector<double> x = {0.3, -0.7}, hp = {0.2, 0.1}, cp = {-0.5, 0.4};
    // independent evaluation of the gate equations, direct arithmetic
    auto row = [&](std::size_t r) {
      double acc = cell.b.value.v[r];
      std::vector<double> in = {x[0], x[1], hp[0], hp[1]};
      for (std::size_t j = 0; j < 4; ++j) acc += cell.w.value.at(r, j) * in[j];
      return acc;
    };
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    for (std::size_t u = 0; u < 2; ++u) {
      double i = sig(row(u)), f = sig(row(2 + u)), g = std::tanh(row(4 + u)),
             o = sig(row(6 + u));
      double c_ref = f * cp[u] + i * g;
      double h_ref = o * std::tanh(c_ref);
      Tape t;
      auto [h, c] = cell.step(t, t.input(Tensor::vec({x[0], x[1]})),
                              t.input(Tensor::vec({hp[0], hp[1]})),
                              t.input(Tensor::vec({cp[0], cp[1]})));
      CHECK(t.val(c).v[u] == doctest::Approx(c_ref).epsilon(1e-12));
      CHECK(t.val(h).v[u] == doctest::Approx(h_ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention weight arithmetic") {
  Tape t;
  SUBCASE("single source position") {
    Tape::Var a = t.softmax(t.stack(std::vector<Tape::Var>{t.input(Tensor::scalar(1.7))}));
    CHECK(t.val(a).v[0] == doctest::Approx(1.0));
    Tape::Var key = t.input(Tensor::vec({2.0, -1.0}));
    Tape::Var ctx = t.blend(a, std::vector<Tape::Var>{key});
    CHECK(t.val(ctx).v[0] == doctest::Approx(2.0));
    CHECK(t.val(ctx).v[1] == doctest::Approx(-1.0));
  }
  SUBCASE("hand-set scores 0, ln2, ln4") {
    std::vector<Tape::Var> scores = {t.input(Tensor::scalar(0.0)),
                                     t.input(Tensor::scalar(std::log(2.0))),
                                     t.input(Tensor::scalar(std::log(4.0)))};
    Tape::Var a = t.softmax(t.stack(scores));
    CHECK(t.val(a).v[0] == doctest::Approx(1.0 / 7).epsilon(1e-12));
    CHECK(t.val(a).v[1] == doctest::Approx(2.0 / 7).epsilon(1e-12));
    CHECK(t.val(a).v[2] == doctest::Approx(4.0 / 7).epsilon(1e-12));
  }
  SUBCASE("identical keys give uniform weights through the score head") {
    // scores of identical keys are identical, so softmax is uniform
    Parameter v = make_param("v", {1, 3}, {0.3, -0.2, 0.9});
    Tape::Var key = t.input(Tensor::vec({0.5, 0.5, -1.0}));
    std::vector<Tape::Var> scores;
    for (int i = 0; i < 4; ++i) scores.push_back(t.affine(key, v, nullptr));
    Tape::Var a = t.softmax(t.stack(scores));
    for (double w : t.val(a).v) CHECK(w == doctest::Approx(0.25));
  }
  SUBCASE("empty source is an error") {
    Tape::Var a = t.input(Tensor({0}));
    CHECK_THROWS_AS(t.blend(a, std::vector<Tape::Var>{}), ShapeError);
  }
}

TEST_CASE("backward") {
  SUBCASE("loss = sum(W x) gives grad(W) = outer structure of x") {
    Parameter w = make_param("w", {2, 3}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    Tape t;
    Tape::Var y = t.affine(t.input(Tensor::vec({2, -1, 3})), w, nullptr);
    Tape::Var loss = t.sum_scalars(std::vector<Tape::Var>{
        t.slice(y, 0, 1), t.slice(y, 1, 1)});
    t.backward(loss);
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(w.grad.at(r, 0) == doctest::Approx(2.0));
      CHECK(w.grad.at(r, 1) == doctest::Approx(-1.0));
      CHECK(w.grad.at(r, 2) == doctest::Approx(3.0));
    }
  }
  SUBCASE("unreachable parameter keeps zero grad") {
    Parameter w = make_param("w", {1, 1}, {2.0});
    Parameter unused = make_param("u", {1, 1}, {1.0});
    Tape t;
    Tape::Var y = t.affine(t.input(Tensor::scalar(1.0)), w, nullptr);
    t.backward(y);
    CHECK(unused.grad.v[0] == 0.0);
    CHECK(w.grad.v[0] == doctest::Approx(1.0));
  }
  SUBCASE("sigmoid'(0) = 0.25") {
    Parameter w = make_param("w", {1, 1}, {0.0});
    Tape t;
    Tape::Var y = t.sigmoid(t.affine(t.input(Tensor::scalar(1.0)), w, nullptr));
    t.backward(y);
    CHECK(w.grad.v[0] == doctest::Approx(0.25));
  }
  SUBCASE("non-scalar loss rejected") {
    Tape t;
    Tape::Var y = t.input(Tensor::vec({1, 2}));
    CHECK_THROWS_AS(t.backward(y), ShapeError);
  }
}

TEST_CASE("gradient_check per layer type") {
  Rng rng(17);

  SUBCASE("affine") {
    Parameter w("w", {3, 4}), b("b", {3});
    randomize(w, rng);
    randomize(b, rng);
    Tensor x({4});
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    std::vector<Parameter*> ps{&w, &b};
    auto res = gradient_check(
        [&](bool with_grad) {
          Tape t;
          Tape::Var y = t.affine(t.input(x), w, &b);
          Tape::Var loss = t.neg_log_pick(t.softmax(y), 1);
          if (with_grad) t.backward(loss);
          return t.val(loss).v[0];
        },
        ps);
    CHECK(res.max_rel_err < 1e-6);
  }

  SUBCASE("constant function has zero error") {
    Parameter w("w", {2, 2});
    randomize(w, rng);
    std::vector<Parameter*> ps{&w};
    auto res = gradient_check([&](bool) { return 3.5; }, ps);
    CHECK(res.max_rel_err == 0.0);
  }

  SUBCASE("lstm cell") {
    LstmLayer cell("cell", 3, 4);
    cell.init(rng);
    Tensor x({3}), h0({4}), c0({4});
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    for (auto& v : h0.v) v = rng.uniform(-0.5, 0.5);
    for (auto& v : c0.v) v = rng.uniform(-0.5, 0.5);
    std::vector<Parameter*> ps{&cell.w, &cell.b};
    auto res = gradient_check(
        [&](bool with_grad) {
          Tape t;
          auto [h, c] = cell.step(t, t.input(x), t.input(h0), t.input(c0));
          (void)c;
          Tape::Var loss = t.neg_log_pick(t.softmax(h), 0);
          if (with_grad) t.backward(loss);
          return t.val(loss).v[0];
        },
        ps);
    CHECK(res.max_rel_err < 1e-6);
  }

  SUBCASE("highway stack") {
    HighwayLstmStack stack("hw", 3, 4, 2);
    stack.init(rng);
    std::vector<Tensor> xs(3, Tensor({3}));
    for (auto& x : xs)
      for (auto& v : x.v) v = rng.uniform(-1, 1);
    std::vector<Parameter*> ps;
    stack.collect(ps);
    Rng dropout_rng(0);
    auto res = gradient_check(
        [&](bool with_grad) {
          Tape t;
          std::vector<Tape::Var> in;
          for (const auto& x : xs) in.push_back(t.input(x));
          auto hs = stack.run(t, in, 0.0, dropout_rng, false);
          Tape::Var loss = t.neg_log_pick(t.softmax(hs.back()), 2);
          if (with_grad) t.backward(loss);
          return t.val(loss).v[0];
        },
        ps);
    CHECK(res.max_rel_err < 1e-6);
  }

  SUBCASE("bce and ce losses") {
    Parameter w("w", {4, 3}), b("b", {4});
    randomize(w, rng);
    randomize(b, rng);
    Tensor x({3}), targets({4});
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    targets.v = {1, 0, 1, 0};
    std::vector<Parameter*> ps{&w, &b};
    auto res = gradient_check(
        [&](bool with_grad) {
          Tape t;
          Tape::Var z = t.affine(t.input(x), w, &b);
          Tape::Var loss = t.sum_scalars(std::vector<Tape::Var>{
              t.bce_with_logits(z, targets), t.ce_with_logits(z, 2)});
          if (with_grad) t.backward(loss);
          return t.val(loss).v[0];
        },
        ps);
    CHECK(res.max_rel_err < 1e-6);
  }

  SUBCASE("ewise max and scatter merge") {
    // fixed weights keep the two max branches well separated, away from the
    // subgradient kink that finite differences cannot probe
    Parameter w = make_param("w", {4, 2}, {0.9, 0.2, -0.4, 0.6, 0.1, -0.8, 0.5, 0.3});
    Tensor x({2});
    x.v = {0.7, -0.3};
    std::vector<Parameter*> ps{&w};
    auto res = gradient_check(
        [&](bool with_grad) {
          Tape t;
          Tape::Var y = t.affine(t.input(x), w, nullptr);
          Tape::Var m = t.ewise_max(t.slice(y, 0, 2), t.slice(y, 2, 2));
          Tape::Var merged = t.scatter_merge(t.softmax(m), {1, 1}, 3);
          Tape::Var loss = t.neg_log_pick(merged, 1);
          if (with_grad) t.backward(loss);
          return t.val(loss).v[0];
        },
        ps);
    CHECK(res.max_rel_err < 1e-6);
  }
}

TEST_CASE("optimizers") {
  SUBCASE("sgd one-step arithmetic") {
    Parameter w = make_param("w", {1}, {1.0});
    w.grad.v[0] = 0.5;
    std::vector<Parameter*> ps{&w};
    sgd_step(ps, 1.0);
    CHECK(w.value.v[0] == doctest::Approx(0.5));
  }
  SUBCASE("zero grad means no change") {
    Parameter w = make_param("w", {1}, {1.25});
    std::vector<Parameter*> ps{&w};
    sgd_step(ps, 1.0);
    CHECK(w.value.v[0] == doctest::Approx(1.25));
    Adam adam(0.01);
    adam.step(ps);
    CHECK(w.value.v[0] == doctest::Approx(1.25));
  }
  SUBCASE("adam first step has bias-corrected magnitude near lr") {
    Parameter w = make_param("w", {1}, {0.0});
    w.grad.v[0] = 0.37;  // any constant gradient
    std::vector<Parameter*> ps{&w};
    Adam adam(0.01);
    adam.step(ps);
    CHECK(std::abs(w.value.v[0]) == doctest::Approx(0.01).epsilon(1e-3));
  }
  SUBCASE("clip rescales to the requested global norm") {
    Parameter a = make_param("a", {2}, {0, 0});
    a.grad.v = {3.0, 4.0};
    std::vector<Parameter*> ps{&a};
    double norm = clip_global_norm(ps, 1.0);
    CHECK(norm == doctest::Approx(5.0));
    CHECK(a.grad.v[0] == doctest::Approx(0.6));
    CHECK(a.grad.v[1] == doctest::Approx(0.8));
  }
}

TEST_CASE("forward determinism is bitwise") {
  LstmLayer cell("cell", 4, 4);
  Rng rng(21);
  cell.init(rng);
  Tensor x({4});
  for (auto& v : x.v) v = rng.uniform(-1, 1);
  auto run = [&] {
    Tape t;
    auto [h, c] = cell.step(t, t.input(x), t.input(Tensor({4})), t.input(Tensor({4})));
    (void)c;
    return t.val(h).v;
  };
  CHECK(run() == run());
}
