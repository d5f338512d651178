#include "limabean/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "limabean/errors.hpp"
#include "limabean/lifetime.hpp"

namespace limabean {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive_y(double y, const char* who) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw SpecError(std::string(who) + ": y must be finite and > 0");
  }
}

void require_positive_t(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw SpecError(std::string(who) + ": t must be finite and > 0");
  }
}

// Runaway detection: for large y the composed map behaves like
// y * t/(k inv m2) with m2 the mean square of the shifted measure, so the
// fixed point escapes to infinity exactly when m2 <= t/(k inv).  For k >= 2
// the root lattice averages to zero and m2 = |lambda|^2 + 1, which makes
// this the central-disk membership |lambda|^2 <= t/(k inv) - 1; at k = 1
// the disk is centered on the initial spectrum instead, so the slope form
// is the one that is correct for every k.
bool in_central_disk(const SymmetricAtomicMeasure& shifted, int k, double t,
                     const StepLawSummary& summary) {
  if (!std::isfinite(summary.inv_l2_sq)) return false;
  return shifted.second_moment() <= t / (k * summary.inv_l2_sq) + 1e-13;
}

// Cross-check an Interior/ExteriorZero verdict against the lifetime test;
// within a band of the support boundary either answer is legitimate.
void check_state_against_lifetime(const EtaResult& result, const InitialLaw& law,
                                  int k, double t, cplx z) {
  const double band = 1e-6 * std::max(1.0, t);
  const double lifetime = lifetime_k(law, k, z);
  if (result.state == EtaResult::State::Interior && lifetime > t + band) {
    throw SolverError("solve_eta_k: positive fixed point at an exterior point "
                      "(lifetime " + std::to_string(lifetime) + " > t " +
                      std::to_string(t) + ")");
  }
  if (result.state == EtaResult::State::ExteriorZero && lifetime < t - band) {
    throw SolverError("solve_eta_k: no fixed point found at an interior point "
                      "(lifetime " + std::to_string(lifetime) + " < t " +
                      std::to_string(t) + ")");
  }
}

// Shared tri-state search for a positive fixed point of y -> F(y) on the
// axis: at most one positive root of g(y) = F(y) - y exists (an analytic
// self-map of the half-plane has at most one interior fixed point), so the
// sign pattern of g over a geometric grid decides the state.
EtaResult fixed_point_on_axis(const std::function<double(double)>& g,
                              double scale, const char* who) {
  EtaResult result;

  // Push the upper end out until g is negative there (guaranteed once the
  // slope test has excluded the runaway regime).
  double y_hi = scale;
  int growth = 0;
  while (g(y_hi) >= 0.0) {
    y_hi *= 2.0;
    if (++growth > 400) {
      throw SolverError(std::string(who) + ": fixed-point bracket failed to close");
    }
  }

  // Walk a geometric grid from far below the natural scale up to y_hi
  // looking for a positive value of g.
  double y_pos = 0.0;
  for (double y = scale * 0x1.0p-45; y < y_hi; y *= 2.0) {
    if (g(y) > 0.0) y_pos = y;  // the root lies above the last positive point
  }
  if (y_pos == 0.0) {
    result.state = EtaResult::State::ExteriorZero;
    return result;
  }

  double lo = y_pos;
  double hi = std::min(2.0 * y_pos, y_hi);
  while (g(hi) > 0.0) hi = std::min(2.0 * hi, y_hi);

  double mid = 0.5 * (lo + hi);
  double defect = g(mid);
  int iter = 0;
  for (; iter < 200 && std::abs(defect) > 1e-13; ++iter) {
    if (defect > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    defect = g(mid);
  }
  // Success is either a small defect or a collapsed bracket: where g is
  // steep the defect cannot reach the tolerance even at the machine-exact
  // root, and the bracket width is the honest error measure.
  if (!std::isfinite(defect) ||
      (std::abs(defect) > 1e-11 && hi - lo > 1e-12 * std::max(1.0, hi))) {
    throw SolverError(std::string(who) + ": fixed-point residual " +
                      std::to_string(std::abs(defect)) +
                      " after 200 bisection steps");
  }
  result.state = EtaResult::State::Interior;
  result.eta = mid * mid;
  result.iterations = iter;
  result.residual = std::abs(defect);
  return result;
}

}  // namespace

void SymmetricAtomicMeasure::validate() const {
  if (atoms.empty()) throw SpecError("SymmetricAtomicMeasure: no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.x >= 0.0) || !std::isfinite(a.x)) {
      throw SpecError("SymmetricAtomicMeasure: atom positions must be finite and >= 0");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw SpecError("SymmetricAtomicMeasure: weights must be finite and > 0");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw SpecError("SymmetricAtomicMeasure: weights sum to " +
                    std::to_string(total) + ", expected 1");
  }
}

double SymmetricAtomicMeasure::second_moment() const {
  double m2 = 0.0;
  for (const auto& a : atoms) m2 += a.weight * a.x * a.x;
  return m2;
}

cplx cauchy_symmetric(const SymmetricAtomicMeasure& m, double y) {
  require_positive_y(y, "cauchy_symmetric");
  // The +/-x pair combines to a single real-coefficient term:
  // (1/2)(1/(iy - x) + 1/(iy + x)) = -i y/(y^2 + x^2).
  double g = 0.0;
  for (const auto& a : m.atoms) g += a.weight * y / (y * y + a.x * a.x);
  return cplx(0.0, -g);
}

cplx h_transform(const SymmetricAtomicMeasure& m, double y) {
  require_positive_y(y, "h_transform");
  // The subtraction 1/g - y cancels catastrophically once y dwarfs every
  // atom (the true value ~ m2/y, the rounding noise ~ y eps).  Clearing
  // denominators first leaves a ratio of positive sums that is exact at
  // every scale:  1 - y g(y) = sum_j w_j x_j^2/(y^2 + x_j^2).
  double num = 0.0;
  double den = 0.0;
  for (const auto& a : m.atoms) {
    const double d = y * y + a.x * a.x;
    num += a.weight * a.x * a.x / d;
    den += a.weight * y / d;
  }
  return cplx(0.0, num / den);
}

SymmetricAtomicMeasure shifted_Z_measure(const InitialLaw& law, int k,
                                         cplx lambda) {
  if (k < 1) throw SpecError("shifted_Z_measure: k must be >= 1");
  law.validate();
  SymmetricAtomicMeasure m;
  m.atoms.reserve(law.atoms.size() * static_cast<std::size_t>(k));
  for (const auto& atom : law.atoms) {
    for (int j = 0; j < k; ++j) {
      const double angle = (atom.angle + 2.0 * kPi * j) / k;
      const cplx root(std::cos(angle), std::sin(angle));
      m.atoms.push_back({std::abs(lambda - root), atom.weight / k});
    }
  }
  return m;
}

cplx semicircle_h(double variance, double y) {
  require_positive_y(y, "semicircle_h");
  if (variance < 0.0 || !std::isfinite(variance)) {
    throw SpecError("semicircle_h: variance must be finite and >= 0");
  }
  // sqrt(y^2 + 4v) - y in cancellation-free form.
  const double root = std::sqrt(y * y + 4.0 * variance);
  return cplx(0.0, 2.0 * variance / (root + y));
}

double step_h_on_axis(const StepLaw& step, int k, double t, double y) {
  const double v = t / k;  // variance of one rescaled step sqrt(t/k) a
  switch (step.kind) {
    case StepLaw::Kind::HaarUnitary:
      // Symmetrized point mass at sqrt(v): H(iy) = i v / y.
      return v / y;
    case StepLaw::Kind::Circular:
      return semicircle_h(v, y).imag();
    case StepLaw::Kind::AtomicSingular: {
      SymmetricAtomicMeasure m;
      m.atoms.reserve(step.singular.atoms.size());
      const double c = std::sqrt(v);
      for (const auto& a : step.singular.atoms) {
        m.atoms.push_back({c * a.value, a.weight});
      }
      return h_transform(m, y).imag();
    }
  }
  throw SpecError("step_h_on_axis: unknown step law kind");
}

cplx principal_kth_root(cplx z, int k) {
  if (k < 1) throw SpecError("principal_kth_root: k must be >= 1");
  if (z == cplx(0.0, 0.0)) return z;
  double arg = std::arg(z);
  if (arg <= -kPi) arg = kPi;  // land the branch cut at argument +pi
  const double mag = std::pow(std::abs(z), 1.0 / k);
  return cplx(mag * std::cos(arg / k), mag * std::sin(arg / k));
}

EtaResult solve_eta_k(const StepLaw& step, const InitialLaw& law, int k,
                      double t, cplx z) {
  if (k < 1) throw SpecError("solve_eta_k: k must be >= 1");
  require_positive_t(t, "solve_eta_k");
  step.validate();
  law.validate();

  const cplx lambda = principal_kth_root(z, k);
  const SymmetricAtomicMeasure shifted = shifted_Z_measure(law, k, lambda);
  if (in_central_disk(shifted, k, t, step.summary())) {
    EtaResult result;
    result.state = EtaResult::State::DiskInfinite;
    return result;
  }

  const auto g = [&](double y) {
    const double u = h_transform(shifted, y).imag();
    return step_h_on_axis(step, k, t, u) - y;
  };
  const double scale =
      std::max({1.0, std::sqrt(shifted.second_moment()), std::sqrt(t / k)});

  EtaResult result = fixed_point_on_axis(g, scale, "solve_eta_k");
  check_state_against_lifetime(result, law, k, t, z);
  return result;
}

EtaResult eta_haar_scalar_equation(const InitialLaw& law, int k, double t,
                                   cplx z) {
  if (k < 1) throw SpecError("eta_haar_scalar_equation: k must be >= 1");
  require_positive_t(t, "eta_haar_scalar_equation");
  law.validate();

  const cplx lambda = principal_kth_root(z, k);
  const SymmetricAtomicMeasure shifted = shifted_Z_measure(law, k, lambda);
  if (in_central_disk(shifted, k, t, StepLaw::haar().summary())) {
    EtaResult result;
    result.state = EtaResult::State::DiskInfinite;
    return result;
  }

  const double v = t / k;
  const auto q = [&](double eta) {
    double sum = 0.0;
    for (const auto& a : shifted.atoms) sum += a.weight / (a.x * a.x + eta);
    return sum - 1.0 / (eta + v);
  };

  EtaResult result;
  if (!(q(0.0) > 0.0)) {
    result.state = EtaResult::State::ExteriorZero;
    return result;
  }

  double hi = std::max(1.0, v);
  int growth = 0;
  while (q(hi) >= 0.0) {
    hi *= 2.0;
    if (++growth > 400) {
      throw SolverError("eta_haar_scalar_equation: bracket failed to close");
    }
  }
  double lo = 0.0;
  double mid = 0.5 * hi;
  double defect = q(mid);
  int iter = 0;
  for (; iter < 200 && std::abs(defect) > 1e-14; ++iter) {
    if (defect > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    defect = q(mid);
  }
  result.state = EtaResult::State::Interior;
  result.eta = mid;
  result.iterations = iter;
  result.residual = std::abs(defect);
  return result;
}

double periodic_inverse_square_sum(double c_sq, double phi) {
  if (!(c_sq >= 0.0) || !std::isfinite(c_sq)) {
    throw SpecError("periodic_inverse_square_sum: c^2 must be finite and >= 0");
  }
  const double c = std::sqrt(c_sq);
  const double denom = std::cosh(c) - std::cos(phi);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  if (c < 1e-8) {
    // sinh(c)/c -> 1 at the removable singularity.
    return (1.0 + c_sq / 6.0) / (2.0 * denom);
  }
  return std::sinh(c) / (2.0 * c * denom);
}

EtaResult solve_eta_infinity(const InitialLaw& law, double t, cplx z) {
  require_positive_t(t, "solve_eta_infinity");
  law.validate();
  if (z == cplx(0.0, 0.0)) {
    throw SpecError("solve_eta_infinity: z must be nonzero");
  }

  const double rho = std::log(std::abs(z));
  const double theta = std::arg(z);
  const auto excess = [&](double eta) {
    double sum = 0.0;
    for (const auto& atom : law.atoms) {
      sum += atom.weight *
             periodic_inverse_square_sum(rho * rho + eta, theta - atom.angle);
    }
    return sum - 1.0 / t;
  };

  EtaResult result;
  if (!(excess(0.0) > 0.0)) {
    result.state = EtaResult::State::ExteriorZero;
    return result;
  }

  // The left side decreases strictly in eta and decays like 1/(2 sqrt(eta)),
  // so a doubling bracket always closes.
  double hi = std::max(1.0, t * t);
  int growth = 0;
  while (excess(hi) >= 0.0) {
    hi *= 2.0;
    if (++growth > 400) {
      throw SolverError("solve_eta_infinity: bracket failed to close");
    }
  }
  double lo = 0.0;
  double mid = 0.5 * hi;
  double defect = excess(mid);
  int iter = 0;
  for (; iter < 300 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++iter) {
    if (defect > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    defect = excess(mid);
  }
  result.state = EtaResult::State::Interior;
  result.eta = mid;
  result.iterations = iter;
  result.residual = std::abs(defect);
  return result;
}

}  // namespace limabean
