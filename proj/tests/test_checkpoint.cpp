#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "elcmp/checkpoint.hpp"

using namespace elcmp;

namespace {

std::string file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  Rng rng(31337);
  Parameter a("model.a", {3, 4});
  Parameter b("model.b", {7});
  for (auto& v : a.value.v) v = rng.uniform(-10, 10);
  for (auto& v : b.value.v) v = rng.uniform(-10, 10);
  a.value.v[0] = 0.1 + 0.2;  // a value with a non-terminating binary fraction
  b.value.v[1] = -0.0;

  std::string path = "/tmp/elcmp_ckpt_test.bin";
  std::vector<Parameter*> out{&a, &b};
  save_checkpoint(path, out);

  Parameter a2("model.a", {3, 4}), b2("model.b", {7});
  std::vector<Parameter*> in{&a2, &b2};
  load_checkpoint(path, in);
  for (std::size_t i = 0; i < a.value.size(); ++i)
    CHECK(std::memcmp(&a.value.v[i], &a2.value.v[i], sizeof(double)) == 0);
  for (std::size_t i = 0; i < b.value.size(); ++i)
    CHECK(std::memcmp(&b.value.v[i], &b2.value.v[i], sizeof(double)) == 0);

  // re-saving the loaded parameters reproduces the file byte for byte
  std::string path2 = "/tmp/elcmp_ckpt_test2.bin";
  save_checkpoint(path2, in);
  CHECK(file_bytes(path) == file_bytes(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("checkpoint errors") {
  std::string path = "/tmp/elcmp_ckpt_err.bin";
  Parameter a("a", {2});
  std::vector<Parameter*> out{&a};
  save_checkpoint(path, out);

  SUBCASE("missing parameter") {
    Parameter other("missing", {2});
    std::vector<Parameter*> in{&other};
    CHECK_THROWS_AS(load_checkpoint(path, in), CheckpointError);
  }
  SUBCASE("dim mismatch") {
    Parameter bad("a", {3});
    std::vector<Parameter*> in{&bad};
    CHECK_THROWS_AS(load_checkpoint(path, in), CheckpointError);
  }
  SUBCASE("bad magic") {
    std::ofstream os(path, std::ios::trunc | std::ios::binary);
    os << "NOPE garbage";
    os.close();
    CHECK_THROWS_AS(read_checkpoint(path), CheckpointError);
  }
  SUBCASE("truncation") {
    std::vector<Parameter*> ps{&a};
    save_checkpoint(path, ps);
    std::string bytes = file_bytes(path);
    std::ofstream os(path, std::ios::trunc | std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 5));
    os.close();
    CHECK_THROWS_AS(read_checkpoint(path), CheckpointError);
  }
  std::remove(path.c_str());
}
