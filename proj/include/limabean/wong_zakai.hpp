#pragma once
#include <cstdint>
#include <vector>

#include "limabean/matrix.hpp"

namespace limabean {

// Time partition 0 = t_0 < t_1 < ... < t_m = T.
struct Partition {
  std::vector<double> times;

  void validate() const;
  double mesh() const;  // largest consecutive gap
  double horizon() const { return times.back(); }
  static Partition uniform(double T, int steps);
};

// Discretization-error study of the partition product against a common
// fine-mesh reference driven by the same Gaussian path.
struct WzReport {
  std::vector<double> meshes;     // strictly decreasing
  std::vector<double> lp_errors;  // E[ sup_t |B_mesh(t) - B_ref(t)|^p ]
  double fitted_slope = 0.0;      // of log error against log mesh
  double slope_ci_low = 0.0;      // bootstrap 95% band
  double slope_ci_high = 0.0;
  int p = 2;
  // Per-mesh, per-trial sup-errors raised to the p-th power (what lp_errors
  // averages); kept for resampling diagnostics.
  std::vector<std::vector<double>> trial_errors;
};

// The partition product Prod_{s in partition} (I + Delta W_s) at the final
// time, given the per-interval Gaussian increments.  Only the full
// matrix-unit basis is supported: for it the Stratonovich correction term
// vanishes and the product is the whole story.
ComplexMatrix wong_zakai_product(int n, const Partition& partition,
                                 const std::vector<ComplexMatrix>& increments,
                                 bool full_matrix_basis = true);

// Couples every mesh in mesh_list to one shared Brownian path per trial
// (reference mesh 8x finer than the finest entry), measures
// sup over the coarse partition's points of the normalized HS error raised
// to the p-th power, and fits the log-log slope with a bootstrap CI.
WzReport wz_convergence_experiment(int n, double T, int p,
                                   const std::vector<double>& mesh_list,
                                   int trials, std::uint64_t seed,
                                   int threads = 0);

}  // namespace limabean
