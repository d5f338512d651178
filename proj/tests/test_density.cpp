// Brown-measure density evaluators.  The k = 2 closed forms double as
// independent oracles for the generic subordination pipeline, so the two
// routes are compared pointwise here; hand-computable values pin each closed
// form against accidental edits (at z = 1 every surd in the Haar form
// collapses to a rational, and on the ray |z| + Re z = 0 the circular form
// reduces to two terms).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "limabean/density.hpp"
#include "limabean/errors.hpp"
#include "limabean/laws.hpp"
#include "limabean/lifetime.hpp"

using namespace limabean;

namespace {

constexpr double kPi = 3.14159265358979323846;

const InitialLaw kTrivial = InitialLaw::trivial();

}  // namespace

TEST_CASE("closed-form densities reproduce hand-computed rational points") {
  // Haar at z = 1, t = 1: |z - 1| = 0 empties the cross term and the value
  // collapses to (100/49 - 1/2) / (4 pi) = 151/(392 pi).
  CHECK(std::abs(density_k2_haar(1.0, cplx(1.0, 0.0)) - 151.0 / (392.0 * kPi)) <
        1e-15);

  // Circular at z = 1, t = 2: the square root keeps a single surd,
  // (119 + sqrt 17)/(272 pi).
  const double circ_ref = (119.0 + std::sqrt(17.0)) / (272.0 * kPi);
  CHECK(std::abs(density_k2_circular(2.0, cplx(1.0, 0.0)) - circ_ref) < 1e-15);

  // Circular on the ray |z| + Re z = 0, where the rationalized form must be
  // regular: q = t and the bracket is 2/t - 4/t^2.
  const double on_ray = density_k2_circular(3.0, cplx(-0.3, 0.0));
  CHECK(on_ray == doctest::Approx((2.0 / 9.0) / (0.6 * kPi)).epsilon(1e-12));
  CHECK(on_ray > 0.0);
}

TEST_CASE("generic evaluator agrees with both closed forms at spot points") {
  struct Probe {
    double t;
    cplx z;
  };
  const std::vector<Probe> haar_probes = {{1.0, {0.9, 0.2}}, {1.0, {1.3, -0.5}}};
  for (const auto& p : haar_probes) {
    REQUIRE(sigma_k_contains(kTrivial, 2, p.t, p.z));
    const double generic = density_k(StepLaw::haar(), kTrivial, 2, p.t, p.z);
    CHECK(std::abs(generic - density_k2_haar(p.t, p.z)) < 5e-8);
  }

  const std::vector<Probe> circ_probes = {
      {1.0, {0.9, 0.35}}, {1.0, {1.2, -0.4}}, {2.0, {0.3, 0.6}}};
  for (const auto& p : circ_probes) {
    REQUIRE(sigma_k_contains(kTrivial, 2, p.t, p.z));
    const double generic = density_k(StepLaw::circular(), kTrivial, 2, p.t, p.z);
    CHECK(std::abs(generic - density_k2_circular(p.t, p.z)) < 5e-8);
  }
}

TEST_CASE("generic density is continuous across the k-th root branch ray") {
  // At t = 2.5 the k = 2 region reaches the negative real axis (the slice
  // there is 2(1 + r) < t).  Values a hair above and below argument pi probe
  // the two sides of the principal root's cut; the density must not jump.
  const double t = 2.5, r = 0.2, eps = 1e-3;
  const cplx above = std::polar(r, kPi - eps);
  const cplx below = std::polar(r, -kPi + eps);
  REQUIRE(sigma_k_contains(kTrivial, 2, t, above));
  REQUIRE(sigma_k_contains(kTrivial, 2, t, below));
  const double da = density_k(StepLaw::circular(), kTrivial, 2, t, above);
  const double db = density_k(StepLaw::circular(), kTrivial, 2, t, below);
  CHECK(da > 0.0);
  CHECK(std::abs(da - db) < 1e-9 * da);
}

TEST_CASE("generic density respects conjugation symmetry") {
  const cplx z(0.95, 0.30);
  const double upper = density_k(StepLaw::circular(), kTrivial, 3, 1.0, z);
  const double lower =
      density_k(StepLaw::circular(), kTrivial, 3, 1.0, std::conj(z));
  CHECK(upper > 0.0);
  CHECK(std::abs(upper - lower) < 1e-9 * upper);
}

TEST_CASE("linearized density is invariant under the k-sheet rotation") {
  // lambda and lambda e^{2 pi i/k} cover the same base point, so the
  // pushforward density must agree on the two sheets.
  const cplx lam = std::polar(1.02, 0.3);
  const cplx omega = std::polar(1.0, 2.0 * kPi / 3.0);
  const double sheet0 =
      density_linearized(StepLaw::circular(), kTrivial, 3, 1.0, lam);
  const double sheet1 =
      density_linearized(StepLaw::circular(), kTrivial, 3, 1.0, lam * omega);
  CHECK(sheet0 > 0.0);
  CHECK(std::abs(sheet0 - sheet1) < 1e-9 * sheet0);
}

TEST_CASE("linearized density matches the closed form through the pushforward") {
  // Generic route: subordination at z = lambda^2 wrapped in the Jacobian.
  // Oracle route: the k = 2 Haar closed form at the same base point.
  const cplx lam = std::polar(1.02, 0.3);
  const cplx z = lam * lam;
  const double generic =
      density_linearized(StepLaw::haar(), kTrivial, 2, 1.0, lam);
  const double oracle = 2.0 * std::norm(lam) * density_k2_haar(1.0, z);
  CHECK(std::abs(generic - oracle) < 1e-8);
}

TEST_CASE("finite-k density approaches the limiting density like 1/k") {
  const cplx z = std::polar(1.05, 0.4);
  const double t = 1.0;
  REQUIRE(lifetime_infinity(kTrivial, z) < t);
  const double rho_inf = density_infinity(t, z);
  CHECK(rho_inf > 0.0);

  double prev_gap = std::numeric_limits<double>::infinity();
  for (int k : {2, 4, 8, 16, 32}) {
    const double gap =
        std::abs(density_k(StepLaw::circular(), kTrivial, k, t, z) - rho_inf);
    CHECK(gap < prev_gap);
    // Halving k's reciprocal should roughly halve the gap.
    if (std::isfinite(prev_gap)) CHECK(gap > 0.3 * prev_gap);
    if (std::isfinite(prev_gap)) CHECK(gap < 0.7 * prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1.5e-3);  // the k = 32 gap
}

TEST_CASE("density grids carry self-consistent bookkeeping") {
  const DensityGrid grid =
      build_density_grid(StepLaw::circular(), kTrivial, 2, 1.0, 24, 1);

  REQUIRE(grid.radii.size() == 24);
  REQUIRE(grid.angles.size() == 24);
  REQUIRE(grid.values.size() == 576);
  REQUIRE(grid.mask.size() == 576);
  CHECK(grid.dr > 0.0);
  CHECK(grid.dtheta == doctest::Approx(2.0 * kPi / 24).epsilon(1e-12));
  CHECK(grid.angles.front() ==
        doctest::Approx(-kPi + 0.5 * grid.dtheta).epsilon(1e-12));
  CHECK(grid.h > 0.0);

  // Unevaluated cells must hold exactly zero; the mass is the midpoint
  // quadrature of the clipped values over the evaluated cells.
  double recomputed = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < grid.radii.size(); ++i) {
    for (std::size_t j = 0; j < grid.angles.size(); ++j) {
      const std::size_t idx = i * grid.angles.size() + j;
      if (grid.mask[idx]) {
        ++evaluated;
        recomputed += std::max(grid.values[idx], 0.0) * grid.radii[i] *
                      grid.dr * grid.dtheta;
      } else {
        CHECK(grid.values[idx] == 0.0);
      }
    }
  }
  CHECK(evaluated >= 100);
  CHECK(grid.mass == doctest::Approx(recomputed).epsilon(1e-12));
  CHECK(grid.mass > 0.9);
  CHECK(grid.mass < 1.1);
  CHECK(grid.min_value <= 0.0);
  CHECK(grid.min_value > -1e-6);
  CHECK(grid.masked_fraction >= 0.0);
  CHECK(grid.masked_fraction < 0.5);
  CHECK(grid.masked_area >= 0.0);

  // The single-threaded build is deterministic.
  const DensityGrid again =
      build_density_grid(StepLaw::circular(), kTrivial, 2, 1.0, 24, 1);
  CHECK(again.mass == grid.mass);
  CHECK(again.values == grid.values);
}

TEST_CASE("grid masses stay near one for the other evaluators") {
  const DensityGrid haar =
      build_density_grid(StepLaw::haar(), kTrivial, 2, 1.0, 24, 1);
  CHECK(haar.mass > 0.9);
  CHECK(haar.mass < 1.1);

  const DensityGrid inf = build_density_grid_infinity(1.0, 24, 1);
  CHECK(inf.mass > 0.9);
  CHECK(inf.mass < 1.1);
  CHECK(inf.min_value > -1e-6);

  // The limiting density is even in the angle, and the angle grid mirrors
  // exactly, so the value table must be symmetric about the real axis.
  const std::size_t n = inf.angles.size();
  for (std::size_t i = 0; i < inf.radii.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = inf.values[i * n + j];
      const double b = inf.values[i * n + (n - 1 - j)];
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("oracle comparison runs clean on a small grid") {
  const K2OracleResult circ = k2_oracle_compare(StepLaw::circular(), 1.0, 12);
  CHECK(circ.points >= 40);
  CHECK(circ.skipped == 0);
  CHECK(circ.max_abs_err < 1e-6);

  // At t = 3 the Haar support has swallowed the origin and the small-radius
  // rows sit inside the excluded core, so a sizable skip count is expected.
  const K2OracleResult haar = k2_oracle_compare(StepLaw::haar(), 3.0, 12);
  CHECK(haar.points >= 80);
  CHECK(haar.max_abs_err < 1e-6);
}

TEST_CASE("density evaluators reject invalid input") {
  const StepLaw circ = StepLaw::circular();
  CHECK_THROWS_AS(density_k(circ, kTrivial, 0, 1.0, cplx(1.0, 0.0)), SpecError);
  CHECK_THROWS_AS(density_k(circ, kTrivial, 2, 0.0, cplx(1.0, 0.0)), SpecError);
  CHECK_THROWS_AS(density_k(circ, kTrivial, 2, 1.0, cplx(1.0, 0.0), -1.0),
                  SpecError);
  CHECK_THROWS_AS(density_k2_haar(0.0, cplx(1.0, 0.0)), SpecError);
  CHECK_THROWS_AS(density_k2_haar(1.0, cplx(-0.3, 0.0)), SpecError);
  CHECK_THROWS_AS(density_k2_haar(1.0, cplx(0.0, 0.0)), SpecError);
  CHECK_THROWS_AS(density_k2_circular(1.0, cplx(0.0, 0.0)), SpecError);
  CHECK_THROWS_AS(density_infinity(1.0, cplx(0.0, 0.0)), SpecError);
  CHECK_THROWS_AS(build_density_grid(circ, kTrivial, 2, 1.0, 15), SpecError);
  CHECK_THROWS_AS(build_density_grid_infinity(1.0, 8), SpecError);
  CHECK_THROWS_AS(k2_oracle_compare(StepLaw::haar(), 1.0, 3), SpecError);
  CHECK_THROWS_AS(k2_oracle_compare(StepLaw::haar(), 1.0, 12, 0.0), SpecError);
  CHECK_THROWS_AS(k2_oracle_compare(StepLaw::haar(), 1.0, 12, 3.2), SpecError);
  CHECK_THROWS_AS(k2_oracle_compare(StepLaw::haar(), 1.0, 12, 0.3, 0.5),
                  SpecError);

  SingularLaw split;
  split.atoms = {{0.0, 0.5}, {std::sqrt(2.0), 0.5}};
  CHECK_THROWS_AS(k2_oracle_compare(StepLaw::atomic(split), 1.0), SpecError);
}

TEST_CASE("density evaluators refuse points outside their domains") {
  // Far-exterior point: no positive fixed point anywhere on the stencil.
  CHECK_THROWS_AS(
      density_k(StepLaw::circular(), kTrivial, 2, 1.0, cplx(5.0, 0.0)),
      SolverError);

  // The limiting support at t = 1 spans |theta| < acos(1 - t/2) = pi/3 and
  // an annulus pinched around |z| = 1.
  CHECK_THROWS_AS(density_infinity(1.0, std::polar(1.0, 1.2)), SpecError);
  const double outer = sigma_infinity_boundary(kTrivial, 1.0, 0.0);
  REQUIRE(outer > 1.0);
  CHECK_THROWS_AS(density_infinity(1.0, cplx(outer + 0.05, 0.0)), SpecError);
  CHECK_THROWS_AS(density_infinity(1.0, cplx(0.9 / outer, 0.0)), SpecError);
  CHECK(density_infinity(1.0, cplx(1.0, 0.0)) > 0.0);

  // Past t = 4 the angular window opens up completely and the negative real
  // axis becomes evaluable.
  CHECK(density_infinity(5.0, cplx(-1.0, 0.0)) > 0.0);
}
