#pragma once
#include <cstdint>
#include <vector>

#include "limabean/laws.hpp"
#include "limabean/matrix.hpp"
#include "limabean/rng.hpp"

namespace limabean {

// One rescaled-walk experiment: U0 * Prod_{j=1..k} (I + sqrt(t/k) A_j) at
// dimension n, with the A_j drawn from step_law and U0 from initial_law.
struct WalkConfig {
  int n = 0;
  int k = 1;
  double t = 0.0;
  StepLaw step_law;
  InitialLaw initial_law = InitialLaw::trivial();
  std::uint64_t seed = 0;
  int trials = 1;

  void validate() const;
};

// Empirical spectral distribution pooled over independent trials: the
// uniform atomic measure on `eigenvalues` (length n * trials).
struct ESD {
  std::vector<cplx> eigenvalues;
  int n = 0;
  int trials = 0;
};

// Fractions of trials whose shifted smallest singular value fell below each
// threshold, plus the raw per-trial values.
struct SigmaMinTable {
  std::vector<double> epsilons;
  std::vector<double> fractions;  // P(sigma_min <= eps), empirical
  std::vector<double> samples;    // per-trial sigma_min, sorted ascending
  double median = 0.0;
};

// Diagonal slot counts for the initial unitary: largest-remainder rounding
// of (w_j * n) so the counts total exactly n.
std::vector<int> atom_slot_counts(const InitialLaw& law, int n);

// Q D Q* with atom phases on the diagonal in the slot counts above and a
// fresh Haar Q.  The trivial law returns the identity exactly.
ComplexMatrix sample_initial_unitary(const InitialLaw& law, int n,
                                     RngStream& rng);

// One realization of the walk; t = 0 returns the initial unitary exactly.
ComplexMatrix simulate_walk(const WalkConfig& cfg, RngStream& rng);

// Eigenvalues of cfg.trials independent walks, pooled.  Trial i draws from
// RngStream(cfg.seed, i), so the result is independent of thread count.
ESD pooled_esd(const WalkConfig& cfg, int threads = 0);

// Distribution of sigma_min(U0 B_k(t) - z I) over cfg.trials walks.
SigmaMinTable sigma_min_shifted_experiment(const WalkConfig& cfg, cplx z,
                                           const std::vector<double>& epsilons,
                                           int threads = 0);

}  // namespace limabean
