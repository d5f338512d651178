#pragma once
#include <stdexcept>
#include <string>

namespace limabean {

// Invalid user-facing input: bad dimensions, malformed laws, unparseable specs.
// The CLI maps this to exit code 2.
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric breakdown: eigensolver non-convergence, root-bracket failure,
// fixed-point solver stall.  The CLI maps this to exit code 3.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace limabean
