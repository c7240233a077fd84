#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sgl/tensor.hpp"

namespace sgl {

// Flat binary checkpoint: a versioned map from names to tensors (shape +
// row-major doubles) plus a string section for metadata such as the config
// and rng state. Layout, all little-endian:
//
//   magic  "SGLCKP01"
//   u64    tensor count
//   per tensor:  u32 name length, name bytes, u32 ndims, u64 dims..., f64...
//   u64    string count
//   per string:  u32 name length, name bytes, u64 value length, value bytes
struct Checkpoint {
  std::map<std::string, std::pair<Shape, std::vector<double>>> tensors;
  std::map<std::string, std::string> strings;

  void put_tensor(const std::string& name, const Tensor& t);
  Tensor get_tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace sgl
