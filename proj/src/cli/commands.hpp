#pragma once
#include <cstdint>
#include <optional>
#include <string>

#include "spec.hpp"

namespace limabean::cli {

struct CliOptions {
  std::string out_dir;                // overrides spec.output_dir when set
  std::optional<std::uint64_t> seed;  // overrides the spec's seed
  int threads = 0;                    // 0 = LIMABEAN_THREADS, then hardware
};

// Executes the spec's command and returns the process exit code: 0 on
// success, 1 when a declared acceptance threshold is breached.  Invalid
// input raises SpecError, numeric failures raise SolverError; the caller
// maps those to exit codes 2 and 3.
int run_command(const ExperimentSpec& spec, const CliOptions& options);

}  // namespace limabean::cli
