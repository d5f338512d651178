#include "limabean/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "limabean/errors.hpp"
#include "limabean/parallel.hpp"
#include "limabean/sampling.hpp"

namespace limabean {

void WalkConfig::validate() const {
  if (n < 1) throw SpecError("WalkConfig: n must be >= 1");
  if (k < 1) throw SpecError("WalkConfig: k must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw SpecError("WalkConfig: t must be finite and >= 0");
  }
  if (trials < 1) throw SpecError("WalkConfig: trials must be >= 1");
  step_law.validate();
  initial_law.validate();
}

std::vector<int> atom_slot_counts(const InitialLaw& law, int n) {
  if (n < 1) throw SpecError("atom_slot_counts: n must be >= 1");
  law.validate();
  const std::size_t m = law.atoms.size();
  std::vector<int> counts(m);
  std::vector<double> remainders(m);
  int assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double target = law.atoms[i].weight * n;
    counts[i] = static_cast<int>(std::floor(target));
    remainders[i] = target - counts[i];
    assigned += counts[i];
  }
  // Hand the leftover slots to the largest fractional parts; ties go to the
  // earlier atom so the outcome is deterministic.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (int extra = 0; extra < n - assigned; ++extra) {
    ++counts[order[static_cast<std::size_t>(extra) % m]];
  }
  return counts;
}

ComplexMatrix sample_initial_unitary(const InitialLaw& law, int n,
                                     RngStream& rng) {
  if (n < 1) throw SpecError("sample_initial_unitary: n must be >= 1");
  law.validate();
  if (law.is_trivial()) {
    return ComplexMatrix::Identity(n, n);
  }
  const std::vector<int> counts = atom_slot_counts(law, n);
  Eigen::VectorXcd d(n);
  int slot = 0;
  for (std::size_t i = 0; i < law.atoms.size(); ++i) {
    const cplx phase(std::cos(law.atoms[i].angle), std::sin(law.atoms[i].angle));
    for (int c = 0; c < counts[i]; ++c) d(slot++) = phase;
  }
  const ComplexMatrix q = sample_haar_unitary(n, rng);
  return q * d.asDiagonal() * q.adjoint();
}

ComplexMatrix simulate_walk(const WalkConfig& cfg, RngStream& rng) {
  cfg.validate();
  ComplexMatrix b = sample_initial_unitary(cfg.initial_law, cfg.n, rng);
  if (cfg.t == 0.0) return b;
  const double c = std::sqrt(cfg.t / cfg.k);
  for (int j = 0; j < cfg.k; ++j) {
    const ComplexMatrix step = sample_step(cfg.n, cfg.step_law, rng);
    b = b * (ComplexMatrix::Identity(cfg.n, cfg.n) + c * step);
  }
  return b;
}

ESD pooled_esd(const WalkConfig& cfg, int threads) {
  cfg.validate();
  ESD esd;
  esd.n = cfg.n;
  esd.trials = cfg.trials;
  esd.eigenvalues.assign(static_cast<std::size_t>(cfg.n) * cfg.trials,
                         cplx(0.0, 0.0));
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t trial) {
    RngStream rng(cfg.seed, trial);
    const ComplexMatrix b = simulate_walk(cfg, rng);
    std::vector<cplx> values;
    try {
      values = eigenvalues(b);
    } catch (const SolverError& err) {
      throw SolverError("pooled_esd: trial " + std::to_string(trial) + ": " +
                        err.what());
    }
    std::copy(values.begin(), values.end(),
              esd.eigenvalues.begin() + static_cast<std::ptrdiff_t>(trial) * cfg.n);
  }, threads);
  return esd;
}

SigmaMinTable sigma_min_shifted_experiment(const WalkConfig& cfg, cplx z,
                                           const std::vector<double>& epsilons,
                                           int threads) {
  cfg.validate();
  if (cfg.step_law.kind == StepLaw::Kind::AtomicSingular &&
      cfg.step_law.summary().kernel_mass > 0.0) {
    throw SpecError("sigma_min_shifted_experiment: step law must be almost "
                    "surely invertible (no mass at zero)");
  }
  SigmaMinTable table;
  table.epsilons = epsilons;
  table.samples.assign(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t trial) {
    RngStream rng(cfg.seed, trial);
    const ComplexMatrix b = simulate_walk(cfg, rng);
    table.samples[trial] = sigma_min(
        b - z * ComplexMatrix::Identity(cfg.n, cfg.n));
  }, threads);
  std::sort(table.samples.begin(), table.samples.end());

  table.fractions.reserve(epsilons.size());
  for (const double eps : epsilons) {
    const auto above = std::upper_bound(table.samples.begin(),
                                        table.samples.end(), eps);
    table.fractions.push_back(
        static_cast<double>(above - table.samples.begin()) /
        static_cast<double>(table.samples.size()));
  }
  const std::size_t half = table.samples.size() / 2;
  table.median = table.samples.size() % 2 == 1
                     ? table.samples[half]
                     : 0.5 * (table.samples[half - 1] + table.samples[half]);
  return table;
}

}  // namespace limabean
