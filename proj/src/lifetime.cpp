#include "limabean/lifetime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "limabean/errors.hpp"

namespace limabean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

void require_k(int k, const char* who) {
  if (k < 1) throw SpecError(std::string(who) + ": k must be >= 1");
}

// Root of a continuous function on [lo, hi] with f(lo), f(hi) of opposite
// sign (either orientation).  Plain bisection: ~55 halvings reach the width
// target from any bracket of size O(1).
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double width_tol = 1e-13) {
  double flo = f(lo);
  for (int iter = 0; iter < 200 && hi - lo > width_tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization of a unimodal profile on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double width_tol = 1e-11) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > width_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

const char* to_string(PhaseClassification::Regime regime) {
  using Regime = PhaseClassification::Regime;
  switch (regime) {
    case Regime::Disk: return "disk";
    case Regime::DiskWithAnnularClosure: return "disk-with-annular-closure";
    case Regime::Annulus: return "annulus";
    case Regime::PuncturedDisk: return "punctured-disk";
    case Regime::DiskPost: return "disk-post";
    case Regime::AnnulusPostInverse: return "annulus-post-inverse";
  }
  return "unknown";
}

double circle_kernel_sum(const InitialLaw& law, cplx z) {
  double sum = 0.0;
  for (const auto& atom : law.atoms) {
    const cplx u(std::cos(atom.angle), std::sin(atom.angle));
    const double d2 = std::norm(u - z);
    if (d2 == 0.0) return kInf;
    sum += atom.weight / d2;
  }
  return sum;
}

double lifetime_prefactor_k(int k, double r) {
  require_k(k, "lifetime_prefactor_k");
  if (r < 0.0 || !std::isfinite(r)) {
    throw SpecError("lifetime_prefactor_k: radius must be finite and >= 0");
  }
  const double L = std::log(r);  // r = 0 gives L = -inf, expm1(-inf) = -1
  if (L == 0.0) return 1.0;      // limit value at the unit circle
  return static_cast<double>(k) * std::expm1(2.0 * L / k) / std::expm1(2.0 * L);
}

double lifetime_prefactor_infinity(double r) {
  if (r < 0.0 || !std::isfinite(r)) {
    throw SpecError("lifetime_prefactor_infinity: radius must be finite and >= 0");
  }
  const double L = std::log(r);
  if (L == 0.0) return 1.0;
  return 2.0 * L / std::expm1(2.0 * L);  // r = 0: -inf / -1 = +inf
}

double lifetime_k(const InitialLaw& law, int k, cplx z) {
  require_k(k, "lifetime_k");
  const double sum = circle_kernel_sum(law, z);
  if (sum == kInf) return 0.0;  // z sits on an atom of the initial spectrum
  return lifetime_prefactor_k(k, std::abs(z)) / sum;
}

double lifetime_k_polar(int k, double r, double theta) {
  require_k(k, "lifetime_k_polar");
  // |z - 1|^2 = r^2 - 2 r cos(theta) + 1 for z = r e^{i theta}
  return lifetime_prefactor_k(k, r) * (r * r - 2.0 * r * std::cos(theta) + 1.0);
}

double lifetime_infinity(const InitialLaw& law, cplx z) {
  const double sum = circle_kernel_sum(law, z);
  if (sum == kInf) return 0.0;
  return lifetime_prefactor_infinity(std::abs(z)) / sum;
}

double lifetime_infinity_polar(double r, double theta) {
  return lifetime_prefactor_infinity(r) *
         (r * r - 2.0 * r * std::cos(theta) + 1.0);
}

double roots_sum_closed_form(int k, cplx lambda) {
  require_k(k, "roots_sum_closed_form");
  const cplx lk = std::pow(lambda, k);
  const double pole = std::norm(lk - 1.0);
  if (pole == 0.0) {
    throw SpecError("roots_sum_closed_form: lambda is a k-th root of unity");
  }
  // (|lambda|^{2k} - 1)/(|lambda|^2 - 1) = expm1(k L)/expm1(L) with
  // L = log|lambda|^2, continued by its limit k on the unit circle.
  const double L = 2.0 * std::log(std::abs(lambda));
  const double ratio =
      (L == 0.0) ? static_cast<double>(k) : std::expm1(k * L) / std::expm1(L);
  return ratio / (static_cast<double>(k) * pole);
}

DomainSlice r_min(const InitialLaw& law, int k, double theta) {
  require_k(k, "r_min");
  law.validate();

  DomainSlice slice;
  slice.theta = theta;

  const cplx dir(std::cos(theta), std::sin(theta));
  const auto profile = [&](double r) { return lifetime_k(law, k, r * dir); };

  double lo = 0.0;
  double hi = 1.0;
  if (!law.is_trivial()) {
    // No unimodality guarantee: bracket the global minimum on a fine grid
    // and report whether the profile's slope changes sign more than once.
    constexpr int kScan = 512;
    std::vector<double> values(kScan + 1);
    for (int i = 0; i <= kScan; ++i) {
      values[i] = profile(static_cast<double>(i) / kScan);
    }
    int best = 0;
    for (int i = 1; i <= kScan; ++i) {
      if (values[i] < values[best]) best = i;
    }
    int transitions = 0;
    int last_sign = 0;
    for (int i = 0; i < kScan; ++i) {
      const double d = values[i + 1] - values[i];
      const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
      if (sign != 0) {
        if (last_sign == -1 && sign == 1) ++transitions;
        if (last_sign == 1 && sign == -1) ++transitions;
        last_sign = sign;
      }
    }
    slice.profile_unimodal = transitions <= 1;
    lo = static_cast<double>(std::max(0, best - 1)) / kScan;
    hi = static_cast<double>(std::min(kScan, best + 1)) / kScan;
  }

  const double interior = golden_min(profile, lo, hi);
  // The endpoints 0 and 1 are exact minimizer candidates (theta = 0 pins the
  // minimum to r = 1 with value 0; steep profiles pin it to r = 0); compare
  // against them so those cases come out without rounding residue.
  double best_r = interior;
  double best_value = profile(interior);
  for (const double candidate : {0.0, 1.0}) {
    const double value = profile(candidate);
    if (value < best_value) {
      best_value = value;
      best_r = candidate;
    }
  }
  slice.r_min = best_r;
  slice.t_star = best_value;
  slice.r_minus = best_r;
  slice.r_plus = best_r;
  return slice;
}

DomainSlice boundary_radii(const InitialLaw& law, int k, double t, double theta) {
  require_k(k, "boundary_radii");
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw SpecError("boundary_radii: t must be finite and > 0");
  }

  DomainSlice slice = r_min(law, k, theta);
  if (slice.t_star >= t) {
    slice.degenerate = true;
    return slice;
  }

  const cplx dir(std::cos(theta), std::sin(theta));
  const auto profile = [&](double r) { return lifetime_k(law, k, r * dir); };
  const auto level = [&](double r) { return profile(r) - t; };

  // Outer radius: the profile increases without bound past the minimizer,
  // so an exponentially grown bracket always closes.
  double hi = std::max(1.0, 2.0 * slice.r_min);
  int growth = 0;
  while (profile(hi) < t) {
    hi *= 2.0;
    if (++growth > 200) {
      throw SolverError("boundary_radii: outer bracket failed to close at t=" +
                        std::to_string(t) + ", theta=" + std::to_string(theta));
    }
  }
  slice.r_plus = bisect(level, slice.r_min, hi);

  // Inner radius: exists only while the level t is below the profile's
  // value k at the origin; otherwise the slice reaches the origin.
  if (static_cast<double>(k) > t && slice.r_min > 0.0) {
    slice.r_minus = bisect(level, 0.0, slice.r_min);
  } else {
    slice.r_minus = 0.0;
  }

  const double residual = std::abs(profile(slice.r_plus) - t);
  if (residual > 1e-10 * std::max(1.0, t)) {
    throw SolverError("boundary_radii: outer radius residual " +
                      std::to_string(residual) + " exceeds tolerance");
  }
  return slice;
}

bool sigma_k_contains(const InitialLaw& law, int k, double t, cplx z) {
  return lifetime_k(law, k, z) < t;
}

std::optional<double> d_k_disk(int k, double t, const StepLawSummary& summary) {
  require_k(k, "d_k_disk");
  if (!std::isfinite(summary.inv_l2_sq)) return std::nullopt;
  const double threshold = static_cast<double>(k) * summary.inv_l2_sq;
  if (t < threshold) return std::nullopt;
  return std::pow(t / threshold - 1.0, static_cast<double>(k) / 2.0);
}

PhaseClassification classify_phase(const InitialLaw& law, int k, double t,
                                   const StepLawSummary& summary) {
  require_k(k, "classify_phase");
  if (!law.is_trivial()) {
    throw SpecError("classify_phase: requires the trivial initial law");
  }
  if (!(t > 0.0)) throw SpecError("classify_phase: t must be > 0");

  PhaseClassification phase;
  phase.t_collision = r_min(law, k, kPi).t_star;
  phase.t_zero = static_cast<double>(k);
  phase.t_disk = static_cast<double>(k) * summary.inv_l2_sq;

  using Regime = PhaseClassification::Regime;
  const double band = 1e-9 * std::max(1.0, t);
  // The puncture check comes first: at k = 2 the collision happens at the
  // origin itself (t_collision = k), and that moment is a punctured disk.
  if (std::abs(t - phase.t_zero) <= band) {
    phase.regime = Regime::PuncturedDisk;
  } else if (std::abs(t - phase.t_collision) <= band) {
    phase.regime = Regime::DiskWithAnnularClosure;
  } else if (t < phase.t_collision) {
    phase.regime = Regime::Disk;
  } else if (t < phase.t_zero) {
    phase.regime = Regime::Annulus;
  } else if (t < phase.t_disk) {
    phase.regime = Regime::DiskPost;
  } else {
    phase.regime = Regime::AnnulusPostInverse;
  }
  return phase;
}

std::vector<cplx> s_k_atoms(const InitialLaw& law, int k,
                            const StepLawSummary& summary) {
  require_k(k, "s_k_atoms");
  law.validate();
  std::vector<cplx> atoms;
  for (const auto& atom : law.atoms) {
    if (atom.weight / k + summary.kernel_mass >= 1.0 - 1e-12) {
      atoms.emplace_back(std::cos(atom.angle), std::sin(atom.angle));
    }
  }
  return atoms;
}

double sigma_infinity_boundary(const InitialLaw& law, double t, double theta) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw SpecError("sigma_infinity_boundary: t must be finite and > 0");
  }
  law.validate();
  const cplx dir(std::cos(theta), std::sin(theta));
  // The ray reaches the region only if the unit-circle point is already
  // inside; otherwise the boundary degenerates to radius 1.  For the
  // trivial law this is the familiar |theta| < arccos(1 - t/2) window.
  if (lifetime_infinity(law, dir) >= t) return 1.0;

  const auto level = [&](double r) { return lifetime_infinity(law, r * dir) - t; };
  double hi = 2.0;
  int growth = 0;
  while (level(hi) < 0.0) {
    hi *= 2.0;
    if (++growth > 200) {
      throw SolverError("sigma_infinity_boundary: bracket failed to close");
    }
  }
  return bisect(level, 1.0, hi);
}

}  // namespace limabean
