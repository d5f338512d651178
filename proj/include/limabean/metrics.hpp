#pragma once
// Statistical comparison layer between simulated spectra and theoretical
// densities: one-dimensional Wasserstein distances (as L1 gaps between
// quantile functions), polar sector-count tests, dilated-support membership,
// Hausdorff gaps between boundary curves, a two-sample KS test, and a small
// log-log slope fit shared by the harness and the tests.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "limabean/density.hpp"
#include "limabean/laws.hpp"
#include "limabean/lifetime.hpp"
#include "limabean/matrix.hpp"

namespace limabean {

// W1 between two empirical clouds with uniform weights, i.e. the integral of
// |Q_a - Q_b| over (0,1). The inputs need not have equal sizes.
double wasserstein1_samples(std::vector<double> a, std::vector<double> b);

// Radial marginal of a polar density grid, as a piecewise-linear CDF over the
// ring edges. Only evaluated (unmasked, in-support) cells contribute mass;
// the CDF is normalized to end at 1.
struct RadialMarginal {
  std::vector<double> edges;  // ring edges, size rings+1, increasing
  std::vector<double> cdf;    // CDF at the edges; front()=0, back()=1
  double quantile(double p) const;
};

RadialMarginal radial_marginal(const DensityGrid& grid);

// W1 between an empirical set of radii and a radial marginal, computed as the
// exact integral of |F_emp - F_marginal| (piecewise-linear vs step function).
double wasserstein1_radial(std::vector<double> radii, const RadialMarginal& marginal);

// Sector-count test: partition the polar window of the grid into
// radial_bins x angular_bins sectors, take the grid's mass share in each
// sector as a multinomial cell probability, and score the empirical counts.
// z-scores are only claimed where the expected count is at least 5 (the
// normal approximation is meaningless below that); such cells are marked in
// `tested`. Samples whose modulus falls outside the window are excluded from
// the multinomial total and reported separately.
struct SectorReport {
  int radial_bins = 0;
  int angular_bins = 0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<double> expected;   // cell probabilities, sums to 1
  std::vector<long> counts;       // empirical counts per cell
  std::vector<double> z_scores;   // 0 where !tested
  std::vector<std::uint8_t> tested;
  std::size_t total = 0;           // samples inside the polar window
  std::size_t outside_window = 0;  // samples beyond the radial window
  double max_abs_z = 0.0;          // over tested cells
};

SectorReport sector_compare(const std::vector<cplx>& samples, const DensityGrid& grid,
                            int radial_bins = 8, int angular_bins = 8);

// Boundary of the lifetime region {T <= t} as a point cloud: outer slice radii
// at n_angles equally spaced angles, plus inner radii where positive.
std::vector<cplx> sigma_k_boundary_points(const InitialLaw& u0, int k, double t,
                                          int n_angles);
// Same for the k=infinity region with trivial initial condition: outer radius
// r(t,theta) and its reflection 1/r on the angular window.
std::vector<cplx> sigma_infinity_boundary_points(double t, int n_angles);

// Fraction of samples lying farther than `dilation` from the region {T_k <= t}:
// points with T_k(z) <= t count as inside; others are measured against the
// boundary cloud.
struct SupportDilationReport {
  double dilation = 0.0;
  std::size_t outside = 0;
  std::size_t total = 0;
  double fraction = 0.0;
};

SupportDilationReport outside_support_fraction(const std::vector<cplx>& samples,
                                               const InitialLaw& u0, int k, double t,
                                               double dilation, int n_angles = 1024);

// Symmetric Hausdorff distance between two finite point clouds.
double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Large-k convergence experiment for the trivial initial condition: for each
// k in `ks` (strictly increasing), the sup of |rho_k - rho_infinity| over a
// fixed set of interior sample points (common to all k, chosen inside the
// intersection of every region in play, with an 8% inset from its radial
// edges) and the Hausdorff distance between the k-boundary and the limiting
// boundary sampled at `boundary_angles` angles.
struct ConvergenceRow {
  int k = 0;
  double sup_gap = 0.0;
  double hausdorff = 0.0;
  int points = 0;
  int skipped = 0;
};

std::vector<ConvergenceRow> limabean_convergence(const StepLaw& step, double t,
                                                 const std::vector<int>& ks,
                                                 int sup_angles = 24,
                                                 int sup_radii = 8,
                                                 int boundary_angles = 1024);

// Least-squares slope of log(y) against log(x). Requires positive entries and
// at least two points.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
// (Stephens' small-sample correction of the Kolmogorov tail sum).
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);

}  // namespace limabean
