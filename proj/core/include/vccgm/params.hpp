#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "vccgm/tensor.hpp"

namespace vccgm {

// Flat collection of named numeric arrays. std::map keeps iteration (and
// therefore serialization and optimizer traversal) in deterministic name
// order.
struct ParamStore {
  std::map<std::string, Tensor> arrays;

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  void add(const std::string& name, Tensor t);
  bool has(const std::string& name) const { return arrays.count(name) > 0; }
  std::int64_t total_elems() const;
  bool same_layout(const ParamStore& other) const;
};

// Checkpoint file: little-endian header (magic "VCKP", u32 version,
// u64 meta length + JSON metadata string, u64 array count) followed by
// named arrays (u32 name length, name bytes, u64 rows, u64 cols, f64
// payload). Section names are "<section>/<array>". Writes are atomic
// (temp file + rename).
struct Checkpoint {
  std::string meta_json;
  std::map<std::string, ParamStore> sections;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vccgm
