#include "limabean/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "limabean/errors.hpp"

namespace limabean {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sorted_finite(std::vector<double>& v, const char* what) {
  if (v.empty()) throw SpecError(std::string(what) + ": empty sample set");
  for (double x : v)
    if (!std::isfinite(x)) throw SpecError(std::string(what) + ": non-finite sample");
  std::sort(v.begin(), v.end());
}

}  // namespace

double wasserstein1_samples(std::vector<double> a, std::vector<double> b) {
  require_sorted_finite(a, "wasserstein1_samples");
  require_sorted_finite(b, "wasserstein1_samples");
  // Integrate |Q_a - Q_b| over p in (0,1). Both quantile functions are step
  // functions with jumps at i/|a| and j/|b|; between consecutive breakpoints
  // each is constant.
  const std::size_t na = a.size(), nb = b.size();
  std::size_t ia = 0, ib = 0;
  double p = 0.0, total = 0.0;
  while (ia < na && ib < nb) {
    const double pa = static_cast<double>(ia + 1) / static_cast<double>(na);
    const double pb = static_cast<double>(ib + 1) / static_cast<double>(nb);
    const double p_next = std::min(pa, pb);
    total += std::abs(a[ia] - b[ib]) * (p_next - p);
    p = p_next;
    if (pa <= p_next) ++ia;
    if (pb <= p_next) ++ib;
  }
  return total;
}

double RadialMarginal::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw SpecError("radial quantile: p outside [0,1]");
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
  if (it == cdf.begin()) return edges.front();
  if (it == cdf.end()) return edges.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  const double c0 = cdf[i - 1], c1 = cdf[i];
  if (c1 <= c0) return edges[i];
  const double frac = (p - c0) / (c1 - c0);
  return edges[i - 1] + frac * (edges[i] - edges[i - 1]);
}

RadialMarginal radial_marginal(const DensityGrid& grid) {
  const std::size_t nr = grid.radii.size(), nt = grid.angles.size();
  if (nr == 0 || nt == 0) throw SpecError("radial_marginal: empty grid");
  RadialMarginal out;
  out.edges.resize(nr + 1);
  for (std::size_t i = 0; i <= nr; ++i)
    out.edges[i] = grid.radii.front() - 0.5 * grid.dr + static_cast<double>(i) * grid.dr;
  out.edges.front() = std::max(out.edges.front(), 0.0);

  out.cdf.assign(nr + 1, 0.0);
  double total = 0.0;
  for (std::size_t ir = 0; ir < nr; ++ir) {
    double ring = 0.0;
    for (std::size_t it = 0; it < nt; ++it) {
      const std::size_t idx = ir * nt + it;
      if (!grid.mask[idx]) continue;
      const double v = grid.values[idx];
      if (std::isfinite(v) && v > 0.0) ring += v;
    }
    ring *= grid.radii[ir] * grid.dr * grid.dtheta;
    total += ring;
    out.cdf[ir + 1] = total;
  }
  if (!(total > 0.0)) throw SpecError("radial_marginal: grid carries no mass");
  for (double& c : out.cdf) c /= total;
  out.cdf.back() = 1.0;
  return out;
}

double wasserstein1_radial(std::vector<double> radii, const RadialMarginal& marginal) {
  require_sorted_finite(radii, "wasserstein1_radial");
  if (marginal.edges.size() < 2 || marginal.edges.size() != marginal.cdf.size())
    throw SpecError("wasserstein1_radial: malformed marginal");

  // Breakpoints where either CDF changes character: every sample value and
  // every marginal edge. Between consecutive breakpoints the empirical CDF is
  // constant and the marginal CDF is linear, so each piece integrates exactly.
  std::vector<double> brk = radii;
  brk.insert(brk.end(), marginal.edges.begin(), marginal.edges.end());
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  const double n = static_cast<double>(radii.size());
  const auto empirical = [&](double x) {
    return static_cast<double>(std::upper_bound(radii.begin(), radii.end(), x) -
                               radii.begin()) /
           n;
  };
  const auto grid_cdf = [&](double x) {
    if (x <= marginal.edges.front()) return 0.0;
    if (x >= marginal.edges.back()) return 1.0;
    const auto it =
        std::upper_bound(marginal.edges.begin(), marginal.edges.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - marginal.edges.begin());
    const double e0 = marginal.edges[i - 1], e1 = marginal.edges[i];
    const double c0 = marginal.cdf[i - 1], c1 = marginal.cdf[i];
    return c0 + (c1 - c0) * (x - e0) / (e1 - e0);
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double a = brk[i], b = brk[i + 1];
    if (!(b > a)) continue;
    const double fe = empirical(a);  // constant on (a, b)
    const double da = fe - grid_cdf(a);
    const double db = fe - grid_cdf(b);
    if (da * db >= 0.0) {
      total += 0.5 * (std::abs(da) + std::abs(db)) * (b - a);
    } else {
      const double xi = a + (b - a) * da / (da - db);
      total += 0.5 * std::abs(da) * (xi - a) + 0.5 * std::abs(db) * (b - xi);
    }
  }
  return total;
}

SectorReport sector_compare(const std::vector<cplx>& samples, const DensityGrid& grid,
                            int radial_bins, int angular_bins) {
  if (radial_bins < 1 || angular_bins < 1)
    throw SpecError("sector_compare: bins must be positive");
  if (samples.empty()) throw SpecError("sector_compare: no samples");
  const std::size_t nr = grid.radii.size(), nt = grid.angles.size();
  if (nr == 0 || nt == 0) throw SpecError("sector_compare: empty grid");

  SectorReport rep;
  rep.radial_bins = radial_bins;
  rep.angular_bins = angular_bins;
  rep.r_lo = std::max(grid.radii.front() - 0.5 * grid.dr, 0.0);
  rep.r_hi = grid.radii.back() + 0.5 * grid.dr;
  const std::size_t cells = static_cast<std::size_t>(radial_bins) *
                            static_cast<std::size_t>(angular_bins);
  rep.expected.assign(cells, 0.0);
  rep.counts.assign(cells, 0);
  rep.z_scores.assign(cells, 0.0);
  rep.tested.assign(cells, 0);

  const double dr_sector = (rep.r_hi - rep.r_lo) / radial_bins;
  const double dth_sector = 2.0 * kPi / angular_bins;
  const auto cell_of = [&](double r, double theta) -> std::ptrdiff_t {
    if (r < rep.r_lo || r > rep.r_hi) return -1;
    int ir = static_cast<int>((r - rep.r_lo) / dr_sector);
    ir = std::clamp(ir, 0, radial_bins - 1);
    int it = static_cast<int>((theta + kPi) / dth_sector);
    it = std::clamp(it, 0, angular_bins - 1);
    return static_cast<std::ptrdiff_t>(ir) * angular_bins + it;
  };

  // Cell probabilities from the grid's own mass distribution.
  double mass = 0.0;
  for (std::size_t ir = 0; ir < nr; ++ir) {
    for (std::size_t it = 0; it < nt; ++it) {
      const std::size_t idx = ir * nt + it;
      if (!grid.mask[idx]) continue;
      const double v = grid.values[idx];
      if (!(std::isfinite(v) && v > 0.0)) continue;
      const double w = v * grid.radii[ir] * grid.dr * grid.dtheta;
      const std::ptrdiff_t c = cell_of(grid.radii[ir], grid.angles[it]);
      if (c >= 0) {
        rep.expected[static_cast<std::size_t>(c)] += w;
        mass += w;
      }
    }
  }
  if (!(mass > 0.0)) throw SpecError("sector_compare: grid carries no mass");
  for (double& e : rep.expected) e /= mass;

  for (const cplx& z : samples) {
    const std::ptrdiff_t c = cell_of(std::abs(z), std::arg(z));
    if (c < 0) {
      ++rep.outside_window;
      continue;
    }
    ++rep.counts[static_cast<std::size_t>(c)];
    ++rep.total;
  }

  const double n = static_cast<double>(rep.total);
  for (std::size_t c = 0; c < cells; ++c) {
    const double p = rep.expected[c];
    const double expect = n * p;
    if (expect < 5.0) continue;  // below the normal-approximation floor
    rep.tested[c] = 1;
    const double sd = std::sqrt(n * p * (1.0 - p));
    rep.z_scores[c] = (static_cast<double>(rep.counts[c]) - expect) / sd;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(rep.z_scores[c]));
  }
  return rep;
}

std::vector<cplx> sigma_k_boundary_points(const InitialLaw& u0, int k, double t,
                                          int n_angles) {
  if (n_angles < 8) throw SpecError("boundary sampling needs at least 8 angles");
  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(2 * n_angles));
  for (int j = 0; j < n_angles; ++j) {
    const double theta = -kPi + (j + 0.5) * 2.0 * kPi / n_angles;
    const DomainSlice slice = boundary_radii(u0, k, t, theta);
    if (slice.degenerate) continue;
    pts.push_back(std::polar(slice.r_plus, theta));
    if (slice.r_minus > 0.0) pts.push_back(std::polar(slice.r_minus, theta));
  }
  if (pts.empty()) throw SpecError("boundary sampling: region is empty at this t");
  return pts;
}

std::vector<cplx> sigma_infinity_boundary_points(double t, int n_angles) {
  if (n_angles < 8) throw SpecError("boundary sampling needs at least 8 angles");
  if (!(t > 0.0)) throw SpecError("boundary sampling needs t > 0");
  const InitialLaw trivial = InitialLaw::trivial();
  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(2 * n_angles));
  for (int j = 0; j < n_angles; ++j) {
    const double theta = -kPi + (j + 0.5) * 2.0 * kPi / n_angles;
    if (lifetime_infinity_polar(1.0, theta) > t) continue;  // outside window
    const double r = sigma_infinity_boundary(trivial, t, theta);
    pts.push_back(std::polar(r, theta));
    pts.push_back(std::polar(1.0 / r, theta));
  }
  if (pts.empty()) throw SpecError("boundary sampling: region is empty at this t");
  return pts;
}

SupportDilationReport outside_support_fraction(const std::vector<cplx>& samples,
                                               const InitialLaw& u0, int k, double t,
                                               double dilation, int n_angles) {
  if (samples.empty()) throw SpecError("outside_support_fraction: no samples");
  if (!(dilation >= 0.0)) throw SpecError("outside_support_fraction: dilation < 0");
  const std::vector<cplx> boundary = sigma_k_boundary_points(u0, k, t, n_angles);

  SupportDilationReport rep;
  rep.dilation = dilation;
  rep.total = samples.size();
  for (const cplx& z : samples) {
    if (sigma_k_contains(u0, k, t, z)) continue;
    double d2 = std::numeric_limits<double>::infinity();
    for (const cplx& b : boundary) d2 = std::min(d2, std::norm(z - b));
    if (std::sqrt(d2) > dilation) ++rep.outside;
  }
  rep.fraction = static_cast<double>(rep.outside) / static_cast<double>(rep.total);
  return rep;
}

double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) throw SpecError("hausdorff_distance: empty cloud");
  const auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
    double worst = 0.0;
    for (const cplx& p : from) {
      double d2 = std::numeric_limits<double>::infinity();
      for (const cplx& q : to) d2 = std::min(d2, std::norm(p - q));
      worst = std::max(worst, d2);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<ConvergenceRow> limabean_convergence(const StepLaw& step, double t,
                                                 const std::vector<int>& ks,
                                                 int sup_angles, int sup_radii,
                                                 int boundary_angles) {
  if (ks.size() < 2) throw SpecError("limabean_convergence: need at least two k values");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1]))
      throw SpecError("limabean_convergence: k values must be strictly increasing");
  }
  if (sup_angles < 4 || sup_radii < 1)
    throw SpecError("limabean_convergence: sample resolution too small");
  const InitialLaw trivial = InitialLaw::trivial();

  // Common sample points: inside the k-region for every k AND inside the
  // limiting region, so each k is measured on identical ground.
  std::vector<cplx> points;
  double r_hi_all = 1.0;
  for (int a = 0; a < sup_angles; ++a) {
    const double theta = -kPi + (a + 0.5) * 2.0 * kPi / sup_angles;
    if (!(lifetime_infinity_polar(1.0, theta) < t)) continue;
    const double r_inf = sigma_infinity_boundary(trivial, t, theta);
    double lo = 1.0 / r_inf, hi = r_inf;
    bool ok = true;
    for (int k : ks) {
      const DomainSlice slice = boundary_radii(trivial, k, t, theta);
      if (slice.degenerate) {
        ok = false;
        break;
      }
      lo = std::max(lo, slice.r_minus);
      hi = std::min(hi, slice.r_plus);
    }
    if (!ok || !(hi > lo)) continue;
    const double width = hi - lo;
    const double inner = lo + 0.08 * width;
    const double outer = hi - 0.08 * width;
    r_hi_all = std::max(r_hi_all, hi);
    for (int j = 0; j < sup_radii; ++j) {
      const double r = inner + (j + 0.5) * (outer - inner) / sup_radii;
      points.push_back(std::polar(r, theta));
    }
  }
  if (points.empty())
    throw SolverError("limabean_convergence: no common interior sample points");

  const std::vector<cplx> inf_cloud = sigma_infinity_boundary_points(t, boundary_angles);
  const double h = 1e-4 * 2.0 * r_hi_all;

  std::vector<ConvergenceRow> rows;
  for (int k : ks) {
    ConvergenceRow row;
    row.k = k;
    row.hausdorff = hausdorff_distance(
        sigma_k_boundary_points(trivial, k, t, boundary_angles), inf_cloud);
    for (const cplx& z : points) {
      try {
        const double gap =
            std::abs(density_k(step, trivial, k, t, z, h) - density_infinity(t, z));
        row.sup_gap = std::max(row.sup_gap, gap);
        ++row.points;
      } catch (const SolverError&) {
        ++row.skipped;
      } catch (const SpecError&) {
        ++row.skipped;
      }
    }
    if (row.points * 2 < static_cast<int>(points.size()))
      throw SolverError("limabean_convergence: k=" + std::to_string(k) +
                        " evaluated on fewer than half the sample points");
    rows.push_back(row);
  }
  return rows;
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw SpecError("fit_loglog_slope: need matching lists with at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw SpecError("fit_loglog_slope: entries must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw SpecError("fit_loglog_slope: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
  require_sorted_finite(a, "two_sample_ks");
  require_sorted_finite(b, "two_sample_ks");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  KsResult res;
  res.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  // Kolmogorov tail sum; terms decay like exp(-2 j^2 lambda^2).
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * lambda * lambda * j * j);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  res.p_value = std::clamp(p, 0.0, 1.0);
  return res;
}

}  // namespace limabean
