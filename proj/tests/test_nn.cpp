#include "doctest.h"

#include "elcmp/nn.hpp"

using namespace elcmp;

TEST_CASE("bilstm encoder shapes and finals") {
  BiLstmEncoder enc("enc", 5, 6, 2);
  Rng rng(3);
  enc.init(rng);
  Tape t;
  std::vector<Tape::Var> inputs;
  for (int i = 0; i < 4; ++i) {
    Tensor x({5});
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    inputs.push_back(t.input(x));
  }
  Rng drop(0);
  EncoderOut out = enc.encode(t, inputs, 0.0, drop, false);
  CHECK(out.seq.size() == 4);
  for (auto v : out.seq) CHECK(t.val(v).size() == 12);
  CHECK(out.final_h_fwd.size() == 2);
  CHECK(t.val(out.final_h_fwd[1]).size() == 6);
  // forward final state of the top layer equals the forward half of the last
  // position's output
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(t.val(out.seq[3]).v[i] == t.val(out.final_h_fwd[1]).v[i]);
}

TEST_CASE("dropout is identity in eval mode and rescales in train mode") {
  Tape t;
  Tensor x({64});
  x.fill(1.0);
  Rng rng(11);
  Tape::Var eval_out = t.dropout(t.input(x), 0.5, rng, false);
  for (double v : t.val(eval_out).v) CHECK(v == 1.0);
  Tape::Var train_out = t.dropout(t.input(x), 0.5, rng, true);
  int zeros = 0;
  for (double v : t.val(train_out).v) {
    if (v == 0.0)
      ++zeros;
    else
      CHECK(v == doctest::Approx(2.0));
  }
  CHECK(zeros > 10);
  CHECK(zeros < 54);
}

TEST_CASE("highway stack keeps per-position width") {
  HighwayLstmStack stack("hw", 7, 5, 3);
  Rng rng(9);
  stack.init(rng);
  Tape t;
  std::vector<Tape::Var> inputs;
  for (int i = 0; i < 3; ++i) {
    Tensor x({7});
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    inputs.push_back(t.input(x));
  }
  Rng drop(0);
  auto hs = stack.run(t, inputs, 0.0, drop, false);
  CHECK(hs.size() == 3);
  for (auto v : hs) CHECK(t.val(v).size() == 5);
}
