#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vccgm::cli {

// Run provenance dropped as manifest.json into every output directory.
// The timestamp is wall clock; every other field is deterministic in the
// invocation, and reproducibility contracts compare manifests modulo the
// timestamp.
struct RunManifest {
  std::string command;
  std::string config_digest;  // fnv1a-64 of the effective config JSON
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

std::string fnv1a64_hex(const std::string& text);
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace vccgm::cli
