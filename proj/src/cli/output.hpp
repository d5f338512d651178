#pragma once
// File emission for the command-line harness: 17-significant-digit float
// formatting (bit-faithful round trips), FNV-1a checksums over the exact
// bytes written, and the run manifest that records them.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace limabean::cli {

// Shortest-faithful decimal rendering: %.17g, enough digits to reproduce the
// exact double on re-parse.
std::string fmt17(double x);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// One output directory per run: data files are written through here so their
// checksums land in manifest.json.
class OutputDir {
 public:
  explicit OutputDir(std::string dir);  // creates the directory tree

  const std::string& dir() const { return dir_; }
  std::string path_of(const std::string& name) const;

  void write_data_file(const std::string& name, std::string_view content);

  // Extra command-specific fields merged into the manifest root (for example
  // the integrated mass of a density grid).
  nlohmann::json& extras() { return extras_; }

  // Writes manifest.json: command, seed, spec hash, per-file checksums, wall
  // time, library version, and the parsed spec itself (so downstream
  // commands can refuse mismatched inputs).
  void write_manifest(const std::string& command, const std::string& canonical_spec,
                      std::uint64_t seed, double wall_seconds);

 private:
  std::string dir_;
  nlohmann::json files_ = nlohmann::json::object();
  nlohmann::json extras_ = nlohmann::json::object();
};

}  // namespace limabean::cli
