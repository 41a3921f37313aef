// Self-describing parameter container. Layout (all little-endian):
//   magic "ELCK", u32 version, u64 parameter count,
//   then per parameter: u32 name length, name bytes, u32 rank,
//   u64 dims[rank], f64 values (row-major).
// Round trips are bit-exact: doubles travel as raw IEEE-754 bit patterns.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "elcmp/tensor.hpp"

namespace elcmp {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const std::string& path, std::span<Parameter* const> params);

// Loads into the given parameters, matched by name. Throws if a parameter is
// missing from the file or its dims disagree.
void load_checkpoint(const std::string& path, std::span<Parameter* const> params);

// Raw listing, for inspection tools.
std::vector<std::pair<std::string, Tensor>> read_checkpoint(const std::string& path);

}  // namespace elcmp
