#include "limabean/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "limabean/errors.hpp"
#include "limabean/lifetime.hpp"
#include "limabean/parallel.hpp"
#include "limabean/subordination.hpp"

namespace limabean {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive_t(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw SpecError(std::string(who) + ": t must be finite and > 0");
  }
}

// k-th root of w on the branch closest to anchor.  The field below is only
// single-valued up to a k-th root of unity, so stencils around a center
// point must stay on the center's branch instead of the principal one.
cplx nearest_kth_root(cplx w, int k, cplx anchor) {
  const cplx principal = principal_kth_root(w, k);
  cplx best = principal;
  double best_dist = std::abs(principal - anchor);
  for (int j = 1; j < k; ++j) {
    const double angle = 2.0 * kPi * j / k;
    const cplx candidate = principal * cplx(std::cos(angle), std::sin(angle));
    const double dist = std::abs(candidate - anchor);
    if (dist < best_dist) {
      best_dist = dist;
      best = candidate;
    }
  }
  return best;
}

// The subordination field V(w) = Sum_j Sum_i w_i conj(lambda - r_ij) /
// (|lambda - r_ij|^2 + eta(w)) over the k-th roots r_ij of the initial
// atoms, with eta re-solved at w.  Throws SolverError when w has left the
// support (no positive fixed point), which the callers use as the signal
// that a stencil leg escaped.
cplx subordination_field(const StepLaw& step, const InitialLaw& law, int k,
                         double t, cplx w, cplx anchor) {
  const EtaResult eta = solve_eta_k(step, law, k, t, w);
  if (eta.state != EtaResult::State::Interior) {
    throw SolverError("density_k: stencil point left the support region");
  }
  const cplx lambda = nearest_kth_root(w, k, anchor);
  cplx field(0.0, 0.0);
  for (const auto& atom : law.atoms) {
    for (int j = 0; j < k; ++j) {
      const double angle = (atom.angle + 2.0 * kPi * j) / k;
      const cplx root(std::cos(angle), std::sin(angle));
      const cplx diff = lambda - root;
      field += atom.weight * std::conj(diff) / (std::norm(diff) + eta.eta);
    }
  }
  return field;
}

// Wirtinger derivative d/dzbar = (d/dx + i d/dy)/2 of the field by central
// differences with step s.
cplx field_dzbar(const StepLaw& step, const InitialLaw& law, int k, double t,
                 cplx z, cplx anchor, double s) {
  const auto V = [&](cplx w) {
    return subordination_field(step, law, k, t, w, anchor);
  };
  const cplx dx = (V(z + s) - V(z - s)) / (2.0 * s);
  const cplx dy = (V(z + cplx(0.0, s)) - V(z - cplx(0.0, s))) / (2.0 * s);
  return 0.5 * (dx + cplx(0.0, 1.0) * dy);
}

double support_diameter(const InitialLaw& law, int k, double t) {
  double r_max = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double theta = -kPi + (j + 0.5) * (2.0 * kPi / 64);
    const DomainSlice slice = boundary_radii(law, k, t, theta);
    if (!slice.degenerate) r_max = std::max(r_max, slice.r_plus);
  }
  if (r_max == 0.0) {
    throw SolverError("density_k: support region appears empty");
  }
  return 2.0 * r_max;
}

double density_k_with_step(const StepLaw& step, const InitialLaw& law, int k,
                           double t, cplx z, double h) {
  const cplx anchor = principal_kth_root(z, k);
  // One Richardson extrapolation of the central difference.
  const cplx coarse = field_dzbar(step, law, k, t, z, anchor, h);
  const cplx fine = field_dzbar(step, law, k, t, z, anchor, 0.5 * h);
  const cplx dzbar = (4.0 * fine - coarse) / 3.0;

  // zbar^{1 - 1/k} on the anchor branch: conj(z)/conj(lambda).
  const cplx outer = std::conj(z) / std::conj(anchor) / (k * kPi);
  const cplx value = outer * dzbar;
  const double scale = std::pow(std::abs(z), 2.0 - 2.0 / k);
  const double density = value.real() / scale;
  if (std::abs(value.imag()) > 0.02 * std::max(std::abs(value.real()), 1e-2)) {
    throw SolverError("density_k: imaginary residue " +
                      std::to_string(value.imag() / scale) +
                      " too large at |z|=" + std::to_string(std::abs(z)));
  }
  return density;
}

}  // namespace

double density_k(const StepLaw& step, const InitialLaw& law, int k, double t,
                 cplx z, double h) {
  if (k < 1) throw SpecError("density_k: k must be >= 1");
  require_positive_t(t, "density_k");
  if (h < 0.0 || !std::isfinite(h)) {
    throw SpecError("density_k: h must be finite and >= 0");
  }
  if (h == 0.0) h = 1e-4 * support_diameter(law, k, t);
  try {
    return density_k_with_step(step, law, k, t, z, h);
  } catch (const SolverError&) {
    // One retry with a tighter stencil before giving up.
    return density_k_with_step(step, law, k, t, z, 0.5 * h);
  }
}

double density_k2_haar(double t, cplx z) {
  require_positive_t(t, "density_k2_haar");
  const double r = std::abs(z);
  const double edge = z.real() + r;
  if (edge == 0.0) {
    throw SpecError("density_k2_haar: pole on the ray |z| + Re z = 0");
  }
  const double a = 2.0 * (r + 1.0) - t;
  const double denom = 4.0 * std::norm(z - 1.0) + t * t - 4.0 * t * (r + 1.0);
  const double main = 4.0 * t * (a * a + 8.0 * edge) / (denom * denom);
  return (main - 1.0 / edge) / (4.0 * kPi * r);
}

double density_k2_circular(double t, cplx z) {
  require_positive_t(t, "density_k2_circular");
  const double r = std::abs(z);
  if (r == 0.0) {
    throw SpecError("density_k2_circular: z must be nonzero");
  }
  // The fixed-point equation for two unit atoms against a variance-t/2
  // semicircle is quadratic, and with E = |z| + Re z its positive root makes
  // the subordinated field's denominators depend on E alone.  Differentiating
  // the resulting field in closed form gives, after the half-angle
  // substitution, a density that is a function of E and t only up to the
  // polar Jacobian.  The naive grouping cancels catastrophically as E -> 0
  // (the ray through the negative real axis), so keep the subtracted pair
  // rationalized; the value extends continuously to E = 0.
  const double edge = r + z.real();
  const double q = std::sqrt(t * t + 32.0 * edge);
  const double value = 2.0 / t - 8.0 / (q * (q + t));
  return value / (2.0 * kPi * r);
}

double density_infinity(double t, cplx z) {
  require_positive_t(t, "density_infinity");
  const double r = std::abs(z);
  if (r == 0.0) throw SpecError("density_infinity: z must be nonzero");
  const double theta = std::arg(z);

  constexpr double kStep = 1e-4;
  if (t <= 4.0) {
    const double theta_max = std::acos(1.0 - t / 2.0);
    // Keep the whole differentiation stencil inside the angular window.
    if (std::abs(theta) >= theta_max - 2.0 * kStep) {
      throw SpecError("density_infinity: angle outside the support window");
    }
  }

  const InitialLaw trivial = InitialLaw::trivial();
  const double outer = sigma_infinity_boundary(trivial, t, theta);
  if (!(r < outer) || !(r > 1.0 / outer)) {
    throw SpecError("density_infinity: radius outside the support annulus");
  }

  const auto phi = [&](double angle) {
    const double R = sigma_infinity_boundary(trivial, t, angle);
    return 2.0 * R * std::sin(angle) /
           (R * R + 1.0 - 2.0 * R * std::cos(angle));
  };
  const auto central = [&](double s) {
    return (phi(theta + s) - phi(theta - s)) / (2.0 * s);
  };
  const double dphi = (4.0 * central(0.5 * kStep) - central(kStep)) / 3.0;
  return (2.0 / t + dphi) / (4.0 * kPi * r * r);
}

double density_linearized(const StepLaw& step, const InitialLaw& law, int k,
                          double t, cplx lambda, double h) {
  if (k < 1) throw SpecError("density_linearized: k must be >= 1");
  const cplx z = std::pow(lambda, k);
  return k * std::pow(std::abs(lambda), 2.0 * k - 2.0) *
         density_k(step, law, k, t, z, h);
}

namespace {

struct SliceTable {
  std::vector<DomainSlice> slices;  // one per grid angle
  double r_lo = std::numeric_limits<double>::infinity();
  double r_hi = 0.0;
  bool any = false;
};

SliceTable scan_slices(const InitialLaw& law, int k, double t,
                       const std::vector<double>& angles) {
  SliceTable table;
  table.slices.reserve(angles.size());
  for (const double theta : angles) {
    DomainSlice slice = boundary_radii(law, k, t, theta);
    if (!slice.degenerate) {
      table.any = true;
      table.r_lo = std::min(table.r_lo, slice.r_minus);
      table.r_hi = std::max(table.r_hi, slice.r_plus);
    }
    table.slices.push_back(std::move(slice));
  }
  return table;
}

DensityGrid grid_from_slices(const SliceTable& table,
                             const std::vector<double>& angles, int resolution,
                             double pole_radius, double disk_radius,
                             const std::function<double(cplx)>& evaluate,
                             double h, int threads) {
  DensityGrid grid;
  grid.angles = angles;
  grid.h = h;
  grid.dtheta = 2.0 * kPi / static_cast<double>(angles.size());

  const double pad = 2.0 * h;
  const double lo = std::max(0.0, table.r_lo - pad);
  const double hi = table.r_hi + pad;
  grid.dr = (hi - lo) / resolution;
  grid.radii.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    grid.radii[i] = lo + (i + 0.5) * grid.dr;
  }

  const std::size_t n_theta = angles.size();
  const std::size_t cells = grid.radii.size() * n_theta;
  grid.values.assign(cells, 0.0);
  grid.mask.assign(cells, 0);

  const double margin = 3.0 * h;  // clearance for the h and h/2 stencils
  std::vector<std::uint8_t> in_support(cells, 0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const std::size_t i = idx / n_theta;
    const std::size_t j = idx % n_theta;
    const DomainSlice& slice = table.slices[j];
    if (slice.degenerate) continue;
    const double r = grid.radii[i];
    if (r <= slice.r_minus || r >= slice.r_plus) continue;
    if (r <= disk_radius) continue;  // inside the reappearing central disk
    in_support[idx] = 1;
    const bool clear = r > slice.r_minus + margin && r < slice.r_plus - margin &&
                       r > disk_radius + margin && r > pole_radius;
    if (clear) grid.mask[idx] = 1;
  }

  std::atomic<std::uint64_t> min_bits{0};  // raw negative minimum, atomically
  const auto update_min = [&](double candidate) {
    std::uint64_t seen = min_bits.load(std::memory_order_relaxed);
    double current;
    do {
      std::memcpy(&current, &seen, sizeof current);
      if (candidate >= current) return;
      std::uint64_t next;
      std::memcpy(&next, &candidate, sizeof next);
      if (min_bits.compare_exchange_weak(seen, next, std::memory_order_relaxed))
        return;
    } while (true);
  };

  parallel_for(cells, [&](std::size_t idx) {
    if (!grid.mask[idx]) return;
    const std::size_t i = idx / n_theta;
    const std::size_t j = idx % n_theta;
    const cplx z = std::polar(grid.radii[i], angles[j]);
    try {
      const double value = evaluate(z);
      grid.values[idx] = value;
      if (value < 0.0) update_min(value);
    } catch (const SolverError&) {
      // Stencil failure this close to a boundary: fall back to masking.
      grid.mask[idx] = 0;
    } catch (const SpecError&) {
      grid.mask[idx] = 0;
    }
  }, threads);

  std::uint64_t seen = min_bits.load();
  std::memcpy(&grid.min_value, &seen, sizeof grid.min_value);
  if (grid.min_value > 0.0) grid.min_value = 0.0;

  std::size_t in_support_cells = 0;
  std::size_t unevaluated = 0;
  for (std::size_t idx = 0; idx < cells; ++idx) {
    if (!in_support[idx]) continue;
    ++in_support_cells;
    const double area = grid.radii[idx / n_theta] * grid.dr * grid.dtheta;
    if (grid.mask[idx]) {
      grid.mass += std::max(grid.values[idx], 0.0) * area;
    } else {
      ++unevaluated;
      grid.masked_area += area;
    }
  }
  grid.masked_fraction =
      in_support_cells > 0
          ? static_cast<double>(unevaluated) / static_cast<double>(in_support_cells)
          : 0.0;
  return grid;
}

std::vector<double> grid_angles(int resolution) {
  std::vector<double> angles(resolution);
  for (int j = 0; j < resolution; ++j) {
    angles[j] = -kPi + (j + 0.5) * (2.0 * kPi / resolution);
  }
  return angles;
}

}  // namespace

DensityGrid build_density_grid(const StepLaw& step, const InitialLaw& law,
                               int k, double t, int resolution, int threads) {
  if (resolution < 16) {
    throw SpecError("build_density_grid: resolution must be >= 16");
  }
  if (k < 1) throw SpecError("build_density_grid: k must be >= 1");
  require_positive_t(t, "build_density_grid");
  step.validate();
  law.validate();

  const std::vector<double> angles = grid_angles(resolution);
  const SliceTable table = scan_slices(law, k, t, angles);
  if (!table.any) {
    throw SolverError("build_density_grid: support region is empty at t=" +
                      std::to_string(t));
  }

  const double h = 1e-4 * 2.0 * table.r_hi;
  const double pole_radius = std::max(2.0 * h, 1e-3);
  const auto disk = d_k_disk(k, t, step.summary());
  const double disk_radius = disk.has_value() ? *disk : 0.0;

  const auto evaluate = [&](cplx z) {
    return density_k_with_step(step, law, k, t, z, h);
  };
  return grid_from_slices(table, angles, resolution, pole_radius, disk_radius,
                          evaluate, h, threads);
}

DensityGrid build_density_grid_infinity(double t, int resolution, int threads) {
  if (resolution < 16) {
    throw SpecError("build_density_grid_infinity: resolution must be >= 16");
  }
  require_positive_t(t, "build_density_grid_infinity");

  const InitialLaw trivial = InitialLaw::trivial();
  const std::vector<double> angles = grid_angles(resolution);
  SliceTable table;
  table.slices.reserve(angles.size());
  for (const double theta : angles) {
    DomainSlice slice;
    slice.theta = theta;
    const double outer = sigma_infinity_boundary(trivial, t, theta);
    if (outer > 1.0) {
      slice.r_minus = 1.0 / outer;
      slice.r_plus = outer;
      slice.r_min = 1.0;
      table.any = true;
      table.r_lo = std::min(table.r_lo, slice.r_minus);
      table.r_hi = std::max(table.r_hi, slice.r_plus);
    } else {
      slice.degenerate = true;
    }
    table.slices.push_back(slice);
  }
  if (!table.any) {
    throw SolverError("build_density_grid_infinity: support is empty at t=" +
                      std::to_string(t));
  }

  const double h = 1e-4 * 2.0 * table.r_hi;
  const auto evaluate = [&](cplx z) { return density_infinity(t, z); };
  // The limiting support is an annulus bounded away from 0; the pole guard
  // never binds but is kept for uniformity.
  return grid_from_slices(table, angles, resolution, 1e-3, 0.0, evaluate, h,
                          threads);
}

K2OracleResult k2_oracle_compare(const StepLaw& step, double t, int resolution,
                                 double angle_margin, double radial_inset) {
  require_positive_t(t, "k2_oracle_compare");
  if (resolution < 4) throw SpecError("k2_oracle_compare: resolution too small");
  if (!(angle_margin > 0.0) || !(angle_margin < kPi))
    throw SpecError("k2_oracle_compare: angle_margin must lie in (0, pi)");
  if (!(radial_inset >= 0.0) || !(radial_inset < 0.5))
    throw SpecError("k2_oracle_compare: radial_inset must lie in [0, 0.5)");
  const bool haar = step.kind == StepLaw::Kind::HaarUnitary;
  if (!haar && step.kind != StepLaw::Kind::Circular)
    throw SpecError("k2_oracle_compare: closed forms exist only for Haar and "
                    "circular steps");

  const InitialLaw trivial = InitialLaw::trivial();
  const double h = 1e-4 * support_diameter(trivial, 2, t);

  K2OracleResult result;
  int candidates = 0;
  const double span = 2.0 * (kPi - angle_margin);
  for (int i = 0; i < resolution; ++i) {
    // Angles stay angle_margin away from the branch ray at argument pi: the
    // Haar closed form has a pole there, and the generic evaluator's k-th
    // root branch cut sits on the same ray.
    const double theta = -kPi + angle_margin + (i + 0.5) * span / resolution;
    const DomainSlice slice = boundary_radii(trivial, 2, t, theta);
    if (slice.degenerate) continue;
    const double width = slice.r_plus - slice.r_minus;
    const double lo = slice.r_minus + radial_inset * width;
    const double hi = slice.r_plus - radial_inset * width;
    if (!(hi > lo)) continue;
    for (int j = 0; j < resolution; ++j) {
      const double r = lo + (j + 0.5) * (hi - lo) / resolution;
      const cplx z = std::polar(r, theta);
      ++candidates;
      double generic = 0.0;
      try {
        generic = density_k(step, trivial, 2, t, z, h);
      } catch (const SolverError&) {
        ++result.skipped;
        continue;
      }
      const double closed = haar ? density_k2_haar(t, z) : density_k2_circular(t, z);
      result.max_abs_err = std::max(result.max_abs_err, std::abs(generic - closed));
      ++result.points;
    }
  }
  if (candidates == 0 || result.points * 2 < candidates) {
    throw SolverError("k2_oracle_compare: grid mostly unevaluable (" +
                      std::to_string(result.points) + " of " +
                      std::to_string(candidates) + " points)");
  }
  return result;
}

}  // namespace limabean
