#pragma once
// Experiment configuration for the harness.  The JSON schema is strict
// (unknown keys are rejected) and parsing retains a canonical serialization
// (sorted keys, two-space indent, trailing newline) so that identical specs
// hash identically and the shipped examples round-trip byte-for-byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limabean/matrix.hpp"
#include "limabean/walk.hpp"

namespace limabean::cli {

// Extra sections consumed by individual commands.  Fields are defaulted so a
// spec only needs the sections its command reads.

struct GridSpec {
  int resolution = 120;
};

struct WzSpec {
  int n = 8;
  double horizon = 1.0;
  std::vector<double> meshes = {0.25, 0.125, 0.0625, 0.03125};
  int trials = 200;
  int p = 2;
};

struct SigmaMinSpec {
  std::vector<int> sizes = {64, 128, 256, 512};
  cplx z = cplx(0.5, 0.0);
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3, 1e-4};
};

struct LimabeanSpec {
  std::vector<int> k_values = {4, 8, 16, 32};
  int sup_angles = 24;
  int sup_radii = 8;
};

struct CompareSpec {
  std::string esd_path;
  std::string density_path;
  double dilation = 0.05;
  // Optional acceptance thresholds; when any is set and breached, the
  // command exits with the tolerance-breach code.
  std::optional<double> max_radial_w1;
  std::optional<double> max_abs_z;
  std::optional<double> max_outside_fraction;
};

struct ExperimentSpec {
  int format_version = 1;
  std::string command;
  bool has_walk = false;
  WalkConfig walk;         // valid only when has_walk
  bool k_infinite = false; // walk.k was the string "infinity"
  GridSpec grid;
  std::string output_dir;  // may be empty; --out overrides
  WzSpec wz;
  SigmaMinSpec sigma_min;
  LimabeanSpec limabean;
  CompareSpec compare;

  // Canonical JSON text of the spec as parsed; serialize_spec returns this,
  // and the manifest hash is taken over it.
  std::string canonical;

  // The walk section, required; throws otherwise.
  const WalkConfig& require_walk() const;
};

ExperimentSpec parse_spec_json(const std::string& text);
ExperimentSpec parse_spec_file(const std::string& path);
std::string serialize_spec(const ExperimentSpec& spec);

bool is_known_command(const std::string& name);

}  // namespace limabean::cli
