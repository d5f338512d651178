#pragma once
#include <cstdint>
#include <vector>

#include "limabean/laws.hpp"
#include "limabean/matrix.hpp"

namespace limabean {

// Polar evaluation grid for a Brown-measure density.  Cell (i, j) sits at
// radius radii[i], angle angles[j] (both cell centers), value at
// values[i * angles.size() + j].  mask = 1 marks cells that were actually
// evaluated: inside the support with enough clearance from its boundary,
// the central pole, and the reappearing central disk for the
// finite-difference stencil to stay interior.
struct DensityGrid {
  std::vector<double> radii;
  std::vector<double> angles;
  std::vector<double> values;      // raw densities; 0 at unevaluated cells
  std::vector<std::uint8_t> mask;  // 1 = evaluated interior cell
  double dr = 0.0;
  double dtheta = 0.0;
  double h = 0.0;     // differentiation step used by the evaluator
  double mass = 0.0;  // midpoint quadrature of clipped values over mask = 1
  double masked_area = 0.0;      // area of in-support cells left unevaluated
  double masked_fraction = 0.0;  // unevaluated / in-support cell count
  double min_value = 0.0;        // most negative raw value seen (noise gauge)

  double value_at(std::size_t i_r, std::size_t i_theta) const {
    return values[i_r * angles.size() + i_theta];
  }
  bool masked_at(std::size_t i_r, std::size_t i_theta) const {
    return mask[i_r * angles.size() + i_theta] == 0;
  }
};

// Brown-measure density of the k-step walk at an interior point z,
// evaluated through the subordination representation: the density is a
// Wirtinger derivative (central differences, one Richardson extrapolation,
// step h) of a field whose regularization parameter eta is re-solved at
// every stencil point.  h <= 0 picks 1e-4 times the support diameter.
// Throws SolverError when the stencil cannot be kept inside the support
// even after shrinking h once.
double density_k(const StepLaw& step, const InitialLaw& law, int k, double t,
                 cplx z, double h = 0.0);

// Closed-form k = 2 densities for the trivial initial law (independent
// oracles for density_k).  The Haar form has a pole on the ray where
// |z| + Re z = 0; the circular form is regular there and only excludes
// z = 0 itself.
double density_k2_haar(double t, cplx z);
double density_k2_circular(double t, cplx z);

// k -> infinity density for the trivial initial law: of the form
// w_t(theta)/r^2 with w_t built from the outer boundary radius r(t, theta).
double density_infinity(double t, cplx z);

// Density of the linearized (single-step) picture at lambda: the k-to-1
// pushforward relation k |lambda|^{2k-2} rho_k(t, lambda^k).
double density_linearized(const StepLaw& step, const InitialLaw& law, int k,
                          double t, cplx lambda, double h = 0.0);

// Cross-validation of the generic k = 2 pipeline against the closed forms:
// max absolute difference over a resolution x resolution interior polar
// grid that keeps `angle_margin` radians away from the branch ray at
// argument pi and `radial_inset` (fraction of the slice width) away from
// the support boundary.  The step must be Haar or circular.  Throws
// SolverError if more than half the grid cannot be evaluated.
struct K2OracleResult {
  double max_abs_err = 0.0;
  int points = 0;
  int skipped = 0;
};

K2OracleResult k2_oracle_compare(const StepLaw& step, double t, int resolution = 40,
                                 double angle_margin = 0.3,
                                 double radial_inset = 0.06);

// Evaluates the k-step density over a polar grid covering the support.
// resolution >= 16 cells per axis.
DensityGrid build_density_grid(const StepLaw& step, const InitialLaw& law,
                               int k, double t, int resolution,
                               int threads = 0);

// Same for the limiting density (trivial initial law).
DensityGrid build_density_grid_infinity(double t, int resolution,
                                        int threads = 0);

}  // namespace limabean
