#include "limabean/wong_zakai.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "limabean/errors.hpp"
#include "limabean/parallel.hpp"
#include "limabean/rng.hpp"
#include "limabean/sampling.hpp"

namespace limabean {

void Partition::validate() const {
  if (times.size() < 2) throw SpecError("Partition: needs at least two times");
  if (times.front() != 0.0) throw SpecError("Partition: must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw SpecError("Partition: times must be strictly increasing");
    }
  }
}

double Partition::mesh() const {
  validate();
  double widest = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    widest = std::max(widest, times[i] - times[i - 1]);
  }
  return widest;
}

Partition Partition::uniform(double T, int steps) {
  if (!(T > 0.0) || steps < 1) {
    throw SpecError("Partition::uniform: need T > 0 and steps >= 1");
  }
  Partition partition;
  partition.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    partition.times[static_cast<std::size_t>(i)] = T * i / steps;
  }
  partition.times.back() = T;
  return partition;
}

ComplexMatrix wong_zakai_product(int n, const Partition& partition,
                                 const std::vector<ComplexMatrix>& increments,
                                 bool full_matrix_basis) {
  if (n < 1) throw SpecError("wong_zakai_product: n must be >= 1");
  partition.validate();
  if (!full_matrix_basis) {
    throw SpecError("wong_zakai_product: only the full matrix basis is "
                    "supported (the correction term vanishes there)");
  }
  if (increments.size() != partition.times.size() - 1) {
    throw SpecError("wong_zakai_product: " +
                    std::to_string(partition.times.size() - 1) +
                    " intervals but " + std::to_string(increments.size()) +
                    " increments");
  }
  ComplexMatrix b = ComplexMatrix::Identity(n, n);
  for (const ComplexMatrix& dw : increments) {
    if (dw.rows() != n || dw.cols() != n) {
      throw SpecError("wong_zakai_product: increment dimension mismatch");
    }
    b = b * (ComplexMatrix::Identity(n, n) + dw);
  }
  return b;
}

WzReport wz_convergence_experiment(int n, double T, int p,
                                   const std::vector<double>& mesh_list,
                                   int trials, std::uint64_t seed,
                                   int threads) {
  if (n < 1) throw SpecError("wz_convergence_experiment: n must be >= 1");
  if (!(T > 0.0)) throw SpecError("wz_convergence_experiment: T must be > 0");
  if (p < 2) throw SpecError("wz_convergence_experiment: p must be >= 2");
  if (trials < 1) throw SpecError("wz_convergence_experiment: trials must be >= 1");
  if (mesh_list.size() < 3) {
    throw SpecError("wz_convergence_experiment: need at least 3 meshes to fit "
                    "a slope");
  }

  // Meshes must be dyadic fractions of T so every partition nests in the
  // 8x-finer reference grid.
  std::vector<double> meshes = mesh_list;
  std::sort(meshes.begin(), meshes.end(), std::greater<double>());
  std::vector<std::size_t> steps_per_mesh;
  for (const double mesh : meshes) {
    const double ratio = T / mesh;
    const double rounded = std::round(ratio);
    if (!(mesh > 0.0) || std::abs(ratio - rounded) > 1e-9 * ratio ||
        (static_cast<std::size_t>(rounded) &
         (static_cast<std::size_t>(rounded) - 1)) != 0) {
      throw SpecError("wz_convergence_experiment: mesh " + std::to_string(mesh) +
                      " is not a dyadic fraction of T");
    }
    steps_per_mesh.push_back(static_cast<std::size_t>(rounded));
  }
  const std::size_t ref_steps = steps_per_mesh.back() * 8;
  const double ref_dt = T / static_cast<double>(ref_steps);

  WzReport report;
  report.meshes = meshes;
  report.p = p;
  report.trial_errors.assign(meshes.size(),
                             std::vector<double>(static_cast<std::size_t>(trials), 0.0));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    RngStream rng(seed, trial);
    const double scale = std::sqrt(ref_dt);

    // March the shared path at reference resolution; each coarser product
    // absorbs whole blocks of reference increments and is compared to the
    // reference product exactly at its own partition points.
    ComplexMatrix b_ref = ComplexMatrix::Identity(n, n);
    std::vector<ComplexMatrix> b_mesh(meshes.size(),
                                      ComplexMatrix::Identity(n, n));
    std::vector<ComplexMatrix> acc(meshes.size(), ComplexMatrix::Zero(n, n));
    std::vector<double> sup_error(meshes.size(), 0.0);
    for (std::size_t s = 1; s <= ref_steps; ++s) {
      const ComplexMatrix dw = scale * sample_ginibre(n, rng);
      b_ref = b_ref * (ComplexMatrix::Identity(n, n) + dw);
      for (std::size_t m = 0; m < meshes.size(); ++m) {
        acc[m] += dw;
        const std::size_t block = ref_steps / steps_per_mesh[m];
        if (s % block == 0) {
          b_mesh[m] = b_mesh[m] * (ComplexMatrix::Identity(n, n) + acc[m]);
          acc[m].setZero();
          sup_error[m] = std::max(sup_error[m], hs_norm(b_mesh[m] - b_ref));
        }
      }
    }
    for (std::size_t m = 0; m < meshes.size(); ++m) {
      report.trial_errors[m][trial] = std::pow(sup_error[m], p);
    }
  }, threads);

  report.lp_errors.resize(meshes.size());
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    double sum = 0.0;
    for (const double e : report.trial_errors[m]) sum += e;
    report.lp_errors[m] = sum / trials;
  }

  const auto fit_slope = [&](const std::vector<double>& level_means) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const std::size_t count = meshes.size();
    for (std::size_t m = 0; m < count; ++m) {
      const double x = std::log(meshes[m]);
      const double y = std::log(level_means[m]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
  };
  report.fitted_slope = fit_slope(report.lp_errors);

  // Bootstrap over trials, resampling the same trial indices at every mesh
  // so the per-path coupling survives resampling.
  constexpr int kBootstrap = 200;
  std::vector<double> slopes(kBootstrap);
  RngStream boot_rng(seed, 0x626f6f74ULL);  // a dedicated stream
  std::vector<double> level_means(meshes.size());
  for (int rep = 0; rep < kBootstrap; ++rep) {
    std::fill(level_means.begin(), level_means.end(), 0.0);
    for (int draw = 0; draw < trials; ++draw) {
      const std::size_t pick = static_cast<std::size_t>(
          boot_rng.uniform() * trials) % static_cast<std::size_t>(trials);
      for (std::size_t m = 0; m < meshes.size(); ++m) {
        level_means[m] += report.trial_errors[m][pick];
      }
    }
    for (double& mean : level_means) mean /= trials;
    slopes[static_cast<std::size_t>(rep)] = fit_slope(level_means);
  }
  std::sort(slopes.begin(), slopes.end());
  report.slope_ci_low = slopes[static_cast<std::size_t>(0.025 * kBootstrap)];
  report.slope_ci_high = slopes[static_cast<std::size_t>(0.975 * kBootstrap) - 1];
  return report;
}

}  // namespace limabean
