// Lifetime function and support geometry.  Oracles are hand-derived closed
// values: at k = 2 the radial prefactor collapses to 2/(r+1), which makes
// whole slices solvable by quadratic formula, and the roots-of-unity sum has
// small-k rational values.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "limabean/errors.hpp"
#include "limabean/laws.hpp"
#include "limabean/lifetime.hpp"
#include "limabean/rng.hpp"
#include "limabean/subordination.hpp"

using namespace limabean;

namespace {

constexpr double kPi = 3.14159265358979323846;

const InitialLaw kTrivial = InitialLaw::trivial();

// Direct evaluation of (1/k^2) Sum_j |z_j - lambda|^{-2} over the k-th roots
// of unity, the slow route the closed form must reproduce.
double roots_sum_direct(int k, cplx lambda) {
  double sum = 0.0;
  for (int j = 0; j < k; ++j) {
    const double phi = 2.0 * kPi * j / k;
    sum += 1.0 / std::norm(cplx(std::cos(phi), std::sin(phi)) - lambda);
  }
  return sum / (k * static_cast<double>(k));
}

StepLawSummary summary_with(double inv_l2_sq, double kernel_mass = 0.0) {
  StepLawSummary s;
  s.inv_l2_sq = inv_l2_sq;
  s.kernel_mass = kernel_mass;
  return s;
}

}  // namespace

TEST_CASE("radial prefactors take their continued values on the circle") {
  for (int k : {1, 2, 3, 7}) {
    CHECK(lifetime_prefactor_k(k, 1.0) == 1.0);
    CHECK(lifetime_prefactor_k(k, 0.0) == doctest::Approx(k).epsilon(1e-15));
  }
  CHECK(lifetime_prefactor_infinity(1.0) == 1.0);
  CHECK(std::isinf(lifetime_prefactor_infinity(0.0)));
  // Near the circle the expm1 forms must not lose digits: compare r = 1 +/- h
  // against the smooth limit 1 for tiny h.
  for (double h : {1e-10, 1e-13}) {
    CHECK(lifetime_prefactor_k(3, 1.0 + h) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lifetime_prefactor_infinity(1.0 - h) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("lifetime closed values at k = 2") {
  // T_2(r e^{i pi}) = 2(1 + r) and T_2(-1/2) = 3 by the quadratic prefactor.
  CHECK(lifetime_k(kTrivial, 2, cplx(-0.5, 0.0)) == doctest::Approx(3.0).epsilon(1e-14));
  for (double r : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(lifetime_k_polar(2, r, kPi) == doctest::Approx(2.0 * (1.0 + r)).epsilon(1e-14));
  }
}

TEST_CASE("lifetime on the unit circle is step-count independent") {
  // Every prefactor equals 1 at r = 1, so T_k(e^{i theta}) = 2(1 - cos theta)
  // for all k including the limit.
  for (double theta : {0.1, 1.0, 2.5}) {
    const double want = 2.0 - 2.0 * std::cos(theta);
    for (int k : {1, 2, 5, 11}) {
      CHECK(lifetime_k_polar(k, 1.0, theta) == doctest::Approx(want).epsilon(1e-13));
    }
    CHECK(lifetime_infinity_polar(1.0, theta) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("lifetime special points") {
  for (int k : {1, 2, 6}) {
    CHECK(lifetime_k(kTrivial, k, cplx(0.0, 0.0)) == doctest::Approx(k).epsilon(1e-14));
  }
  CHECK(lifetime_k(kTrivial, 3, cplx(1.0, 0.0)) == 0.0);  // atom of the spectrum
  CHECK(std::isinf(lifetime_infinity_polar(0.0, 0.0)));
  CHECK(lifetime_infinity(kTrivial, cplx(1.0, 0.0)) == 0.0);
  // T_infinity(2) = log(4)/3: prefactor log(r^2)/(r^2-1) at r = 2 times 1.
  CHECK(lifetime_infinity(kTrivial, cplx(2.0, 0.0)) ==
        doctest::Approx(std::log(4.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("roots-of-unity sum: rational oracles and the direct route") {
  CHECK(roots_sum_closed_form(1, cplx(3.0, 0.0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(roots_sum_closed_form(2, cplx(2.0, 0.0)) ==
        doctest::Approx(5.0 / 18.0).epsilon(1e-15));

  RngStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 8);
    // Stay away from the unit circle so the direct sum is well conditioned.
    const double r = (trial % 2 == 0) ? 0.2 + 0.6 * rng.uniform()
                                      : 1.2 + 2.0 * rng.uniform();
    const cplx lambda = std::polar(r, 2.0 * kPi * rng.uniform());
    const double closed = roots_sum_closed_form(k, lambda);
    const double direct = roots_sum_direct(k, lambda);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("roots-of-unity sum rejects poles") {
  CHECK_THROWS_AS(roots_sum_closed_form(4, cplx(0.0, 1.0)), SpecError);
  CHECK_THROWS_AS(roots_sum_closed_form(1, cplx(1.0, 0.0)), SpecError);
}

TEST_CASE("lifetime equals the inverse weighted roots sum in the root plane") {
  // T_k(u0, lambda^k) * Sum_i w_i (1/k^2) Sum_j |root_ij - lambda|^{-2} = 1:
  // the polar-prefactor form and the linearized root-plane form are the same
  // function.  Checked for the trivial law and a two-atom law.
  InitialLaw two_atoms;
  two_atoms.atoms = {{0.7, 0.4}, {-2.0, 0.6}};
  RngStream rng(13);
  for (const InitialLaw& law : {kTrivial, two_atoms}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int k = 1 + static_cast<int>(rng.next_u64() % 6);
      const double r = 0.1 + 2.4 * rng.uniform();
      const cplx lambda = std::polar(r, kPi * (2.0 * rng.uniform() - 1.0));
      double weighted = 0.0;
      for (const auto& atom : law.atoms) {
        double atom_sum = 0.0;
        for (int j = 0; j < k; ++j) {
          const double phi = (atom.angle + 2.0 * kPi * j) / k;
          atom_sum += 1.0 / std::norm(std::polar(1.0, phi) - lambda);
        }
        weighted += atom.weight * atom_sum / (k * static_cast<double>(k));
      }
      const cplx z = std::pow(lambda, k);
      const double t = lifetime_k(law, k, z);
      if (!std::isfinite(weighted) || t == 0.0) continue;  // lambda on a root
      CHECK(t * weighted == doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("lifetime approaches the limit monotonically, one-sided in radius") {
  // k expm1(2 log(r)/k) decreases in k toward 2 log(r), so T_k falls toward
  // T_infinity outside the unit circle and climbs toward it inside (the
  // r^2 - 1 denominator flips the direction); on the circle all are equal.
  for (double r : {0.2, 0.7, 1.4, 2.1}) {
    for (double theta : {0.3, 1.1, 2.8}) {
      const double limit = lifetime_infinity_polar(r, theta);
      double prev = lifetime_k_polar(1, r, theta);
      double prev_gap = std::abs(prev - limit);
      for (int k : {2, 3, 5, 9}) {
        const double tk = lifetime_k_polar(k, r, theta);
        if (r < 1.0) {
          CHECK(tk > prev);
          CHECK(tk < limit);
        } else {
          CHECK(tk < prev);
          CHECK(tk > limit);
        }
        const double gap = std::abs(tk - limit);
        CHECK(gap < prev_gap);
        prev = tk;
        prev_gap = gap;
      }
    }
  }
}

TEST_CASE("radial profile minimizer") {
  SUBCASE("along the positive axis the minimum sits on the atom") {
    for (int k : {1, 2, 4}) {
      const DomainSlice slice = r_min(kTrivial, k, 0.0);
      CHECK(slice.r_min == 1.0);
      CHECK(slice.t_star == 0.0);
      CHECK(slice.profile_unimodal);
    }
  }
  SUBCASE("at k = 2 the opposite ray collapses to the origin") {
    const DomainSlice slice = r_min(kTrivial, 2, kPi);
    CHECK(slice.r_min == 0.0);
    CHECK(slice.t_star == 2.0);
  }
  SUBCASE("the profile minimum grows with the angle") {
    double prev = -1.0;
    for (double theta : {0.4, 1.0, 1.8, 2.6, kPi}) {
      const double t_star = r_min(kTrivial, 3, theta).t_star;
      CHECK(t_star > prev);
      prev = t_star;
    }
  }
}

TEST_CASE("slice radii at k = 2, theta = 0 solve the quadratic exactly") {
  // 2/(r+1) (1-r)^2 = 1 has roots (5 +/- sqrt(17))/4.
  const DomainSlice slice = boundary_radii(kTrivial, 2, 1.0, 0.0);
  REQUIRE_FALSE(slice.degenerate);
  const double root17 = std::sqrt(17.0);
  CHECK(slice.r_minus == doctest::Approx((5.0 - root17) / 4.0).epsilon(1e-12));
  CHECK(slice.r_plus == doctest::Approx((5.0 + root17) / 4.0).epsilon(1e-12));
  CHECK(lifetime_k_polar(2, slice.r_minus, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lifetime_k_polar(2, slice.r_plus, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("slices degenerate when the ray misses the region") {
  const DomainSlice slice = boundary_radii(kTrivial, 3, 1.0, kPi);
  CHECK(slice.degenerate);
  CHECK(slice.r_minus == slice.r_plus);
  CHECK(slice.r_minus == slice.r_min);
  CHECK(slice.t_star > 1.0);
}

TEST_CASE("slice endpoints are level-set points for a two-atom law too") {
  InitialLaw law;
  law.atoms = {{2.0 * kPi / 3.0, 0.5}, {-2.0 * kPi / 3.0, 0.5}};
  const DomainSlice slice = boundary_radii(law, 2, 0.8, 2.0);
  if (!slice.degenerate) {
    CHECK(lifetime_k(law, 2, std::polar(slice.r_minus, 2.0)) ==
          doctest::Approx(0.8).epsilon(1e-8));
    CHECK(lifetime_k(law, 2, std::polar(slice.r_plus, 2.0)) ==
          doctest::Approx(0.8).epsilon(1e-8));
  }
}

TEST_CASE("region membership is the strict sublevel set") {
  CHECK(sigma_k_contains(kTrivial, 2, 3.0, cplx(0.0, 0.0)));        // T = 2 < 3
  CHECK_FALSE(sigma_k_contains(kTrivial, 2, 2.0, cplx(0.0, 0.0)));  // T = 2, not <
  CHECK(sigma_k_contains(kTrivial, 2, 0.5, cplx(1.0, 0.0)));        // atoms die at 0
  CHECK_FALSE(sigma_k_contains(kTrivial, 2, 3.9, cplx(-1.0, 0.0))); // T_2(-1) = 4
  CHECK(sigma_k_contains(kTrivial, 2, 4.1, cplx(-1.0, 0.0)));
}

TEST_CASE("inner-disk radius past the invertibility threshold") {
  const StepLawSummary haar = StepLaw::haar().summary();
  CHECK(haar.inv_l2_sq == 1.0);
  CHECK_FALSE(d_k_disk(2, 1.9, haar).has_value());
  CHECK(d_k_disk(2, 2.0, haar).value() == 0.0);
  CHECK(d_k_disk(2, 5.0, haar).value() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(d_k_disk(3, 6.0, haar).value() == doctest::Approx(1.0).epsilon(1e-14));
  // Circular steps are never L2-invertible: no disk at any t.
  CHECK_FALSE(d_k_disk(2, 100.0, StepLaw::circular().summary()).has_value());
}

TEST_CASE("phase diagram at k = 3 with Haar steps") {
  using Regime = PhaseClassification::Regime;
  const StepLawSummary haar = StepLaw::haar().summary();
  const PhaseClassification base = classify_phase(kTrivial, 3, 1.0, haar);
  const double tc = base.t_collision;
  CHECK(tc > 0.0);
  CHECK(tc < 3.0);
  CHECK(base.t_zero == 3.0);
  CHECK(base.t_disk == 3.0);  // Haar: the disk reappears exactly at t_zero

  const auto regime_at = [&](double t) {
    return classify_phase(kTrivial, 3, t, haar).regime;
  };
  CHECK(regime_at(0.5 * tc) == Regime::Disk);
  CHECK(regime_at(tc) == Regime::DiskWithAnnularClosure);
  CHECK(regime_at(0.5 * (tc + 3.0)) == Regime::Annulus);
  CHECK(regime_at(3.0) == Regime::PuncturedDisk);
  CHECK(regime_at(3.5) == Regime::AnnulusPostInverse);
}

TEST_CASE("phase diagram with a spread singular law has a disk-post window") {
  using Regime = PhaseClassification::Regime;
  // inv_l2_sq = 4/3 > 1 separates t_zero = 2 from t_disk = 8/3.
  const StepLawSummary spread = summary_with(4.0 / 3.0);
  CHECK(classify_phase(kTrivial, 2, 2.5, spread).regime == Regime::DiskPost);
  CHECK(classify_phase(kTrivial, 2, 2.7, spread).regime == Regime::AnnulusPostInverse);
}

TEST_CASE("point masses appear only when kernel and atom weight fill up") {
  const StepLawSummary haar = StepLaw::haar().summary();
  CHECK(s_k_atoms(kTrivial, 1, haar).size() == 1);
  CHECK(s_k_atoms(kTrivial, 2, haar).empty());
  // Kernel mass 1/2 plus atom weight 1 over k = 2 reaches the threshold.
  const StepLawSummary heavy = summary_with(1.0, 0.5);
  REQUIRE(s_k_atoms(kTrivial, 2, heavy).size() == 1);
  CHECK(std::abs(s_k_atoms(kTrivial, 2, heavy)[0] - cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("limiting outer boundary radius") {
  SUBCASE("outside the angular window the radius degenerates to 1") {
    // t = 1: window |theta| < arccos(1/2) = pi/3.
    CHECK(sigma_infinity_boundary(kTrivial, 1.0, 1.2) == 1.0);
    CHECK(sigma_infinity_boundary(kTrivial, 1.0, -2.0) == 1.0);
  }
  SUBCASE("inside the window it is the level-set root above the circle") {
    for (double theta : {0.0, 0.5, 0.9}) {
      const double r = sigma_infinity_boundary(kTrivial, 1.0, theta);
      CHECK(r > 1.0);
      CHECK(lifetime_infinity_polar(r, theta) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("larger t pushes the boundary out") {
    CHECK(sigma_infinity_boundary(kTrivial, 2.0, 0.0) >
          sigma_infinity_boundary(kTrivial, 1.0, 0.0));
  }
}

TEST_CASE("kernel sum and validation") {
  CHECK(std::isinf(circle_kernel_sum(kTrivial, cplx(1.0, 0.0))));
  CHECK(circle_kernel_sum(kTrivial, cplx(-1.0, 0.0)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(lifetime_k(kTrivial, 0, cplx(0.5, 0.0)), SpecError);
  CHECK_THROWS_AS(lifetime_prefactor_k(2, -0.1), SpecError);
  CHECK_THROWS_AS(boundary_radii(kTrivial, 2, -1.0, 0.0), SpecError);
}
