#pragma once
#include <optional>
#include <vector>

#include "limabean/laws.hpp"
#include "limabean/matrix.hpp"

namespace limabean {

// Radial cross-section of the support region at a fixed angle: the lifetime
// profile r -> T_k(r e^{i theta}) is unimodal with minimizer r_min and
// minimum value t_star, and the slice of {T_k < t} along the ray is the
// interval (r_minus, r_plus).
struct DomainSlice {
  double theta = 0.0;
  double r_min = 1.0;
  double t_star = 0.0;
  double r_minus = 0.0;
  double r_plus = 0.0;
  // True when t_star >= t: the ray misses the region and r_minus = r_plus
  // = r_min by convention.
  bool degenerate = false;
  // Cleared when a general (multi-atom) initial law produces a profile whose
  // finite differences change sign more than once; the returned minimizer is
  // then only the best grid candidate.
  bool profile_unimodal = true;
};

// Topology of the support region as t crosses the three thresholds
// t_collision <= t_zero = k <= t_disk = k * inv_l2_sq.
struct PhaseClassification {
  enum class Regime {
    Disk,                    // t < t_collision
    DiskWithAnnularClosure,  // t = t_collision (boundary touches itself)
    Annulus,                 // t_collision < t < k
    PuncturedDisk,           // t = k (inner radius reaches the origin)
    DiskPost,                // k < t < k * inv_l2_sq
    AnnulusPostInverse,      // t >= k * inv_l2_sq (inner disk reappears)
  };
  Regime regime = Regime::Disk;
  double t_collision = 0.0;  // t_k^c, the self-intersection time at theta = pi
  double t_zero = 0.0;       // k, when the inner radius hits 0
  double t_disk = 0.0;       // k * inv_l2_sq, may be +infinity
};

const char* to_string(PhaseClassification::Regime regime);

// Sum_i w_i / |e^{i theta_i} - z|^2; +infinity when z sits on an atom.
double circle_kernel_sum(const InitialLaw& law, cplx z);

// Radial prefactors k(r^{2/k} - 1)/(r^2 - 1) and log(r^2)/(r^2 - 1),
// continued through r = 1 by their limit value 1.  Both are evaluated in
// expm1 form so they stay accurate to machine precision arbitrarily close
// to the unit circle.
double lifetime_prefactor_k(int k, double r);
double lifetime_prefactor_infinity(double r);

// Lifetime of the point z: the time at which z is swallowed by the support
// of the k-step Brown measure started from the given initial spectrum.
// Returns 0 at atoms of the law and k at z = 0.
double lifetime_k(const InitialLaw& law, int k, cplx z);
double lifetime_k_polar(int k, double r, double theta);  // trivial initial law

// k -> infinity lifetime; +infinity at z = 0, 0 at atoms.
double lifetime_infinity(const InitialLaw& law, cplx z);
double lifetime_infinity_polar(double r, double theta);  // trivial initial law

// (1/k^2) Sum_j 1/|z_j - lambda|^2 over the k-th roots of unity z_j, via the
// closed form (1/k) (|lambda|^{2k} - 1) / ((|lambda|^2 - 1) |lambda^k - 1|^2),
// continued through |lambda| = 1.  Throws SpecError at roots of unity.
double roots_sum_closed_form(int k, cplx lambda);

// Minimizer of the radial lifetime profile at angle theta.  Golden-section
// under the unimodality guarantee for the trivial law; for general laws a
// 512-point scan brackets the global minimum first and flags non-unimodal
// profiles.  Fills theta, r_min, t_star (r_minus = r_plus = r_min).
DomainSlice r_min(const InitialLaw& law, int k, double theta);

// Full slice at level t: boundary radii on both sides of the minimizer.
DomainSlice boundary_radii(const InitialLaw& law, int k, double t, double theta);

// Membership test for the open support region {T_k < t}.
bool sigma_k_contains(const InitialLaw& law, int k, double t, cplx z);

// Radius of the central disk that reappears once t reaches k * inv_l2_sq;
// empty (nullopt) while t < k * inv_l2_sq or when the step is not L2-invertible.
std::optional<double> d_k_disk(int k, double t, const StepLawSummary& summary);

// Phase of the support region for the trivial initial law.
PhaseClassification classify_phase(const InitialLaw& law, int k, double t,
                                   const StepLawSummary& summary);

// Candidate locations e^{i theta_i} of point masses of the Brown measure:
// an initial atom of weight w contributes one when w/k + kernel_mass >= 1.
std::vector<cplx> s_k_atoms(const InitialLaw& law, int k,
                            const StepLawSummary& summary);

// Outer boundary radius r(t, theta) >= 1 of the limiting support: the root
// of T_infinity(r, theta) = t above the unit circle, or 1 when the ray
// misses the region (for the trivial law: |theta| >= arccos(1 - t/2) when
// t <= 4).
double sigma_infinity_boundary(const InitialLaw& law, double t, double theta);

}  // namespace limabean
