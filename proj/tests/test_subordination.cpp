// Fixed-point solvers for the regularization parameter eta.  The oracles
// come from three independent directions: hand-evaluated transforms of tiny
// atomic measures, the quadratic closed form available at k = 2 with
// circular steps, and the lifetime function (interior/exterior verdicts must
// match the sublevel-set geometry).
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

SymmetricAtomicMeasure pair_at_one() {
  SymmetricAtomicMeasure m;
  m.atoms = {{1.0, 1.0}};
  return m;
}

// eta at k = 2 for circular steps: the two-atom fixed-point equation is a
// quadratic in eta whose positive root is t/4 - (|l|^2 + 1) + q/4 with
// q = sqrt(64 x^2 + t^2), x = Re l, l = sqrt(z).
double eta_k2_circular_closed(double t, cplx z) {
  const cplx l = std::sqrt(z);
  const double x = l.real();
  return t / 4.0 - (std::norm(l) + 1.0) + 0.25 * std::sqrt(64.0 * x * x + t * t);
}

// Quantile discretization of the quarter-circle singular law of a circular
// element (density sqrt(4 - s^2)/pi on [0, 2]), via bisection on the CDF.
SymmetricAtomicMeasure quarter_circle_atoms(int m) {
  const auto cdf = [](double s) {
    return (s * std::sqrt(4.0 - s * s) / 2.0 + 2.0 * std::asin(s / 2.0)) / kPi;
  };
  SymmetricAtomicMeasure out;
  out.atoms.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double p = (i + 0.5) / m;
    double lo = 0.0, hi = 2.0;
    for (int step = 0; step < 60; ++step) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    out.atoms.push_back({0.5 * (lo + hi), 1.0 / m});
  }
  return out;
}

}  // namespace

TEST_CASE("cauchy transform of the symmetrized unit atom") {
  // G(i) = -i/2 and H(2i) = i/2 by direct evaluation.
  const SymmetricAtomicMeasure m = pair_at_one();
  const cplx g = cauchy_symmetric(m, 1.0);
  CHECK(g.real() == 0.0);
  CHECK(g.imag() == doctest::Approx(-0.5).epsilon(1e-15));
  const cplx h = h_transform(m, 2.0);
  CHECK(h.real() == 0.0);
  CHECK(h.imag() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cauchy transform respects dilation") {
  // Scaling every atom by c > 0 scales the transform: G_{c mu}(c iy) =
  // G_mu(iy)/c.  A cheap detector of normalization slips.
  SymmetricAtomicMeasure m;
  m.atoms = {{0.4, 0.25}, {1.3, 0.5}, {2.2, 0.25}};
  const double c = 1.7;
  SymmetricAtomicMeasure scaled;
  for (const auto& a : m.atoms) scaled.atoms.push_back({c * a.x, a.weight});
  for (double y : {0.3, 1.0, 4.0}) {
    CHECK(cauchy_symmetric(scaled, c * y).imag() ==
          doctest::Approx(cauchy_symmetric(m, y).imag() / c).epsilon(1e-14));
  }
}

TEST_CASE("shifted spectrum measure enumerates the root lattice") {
  SUBCASE("trivial law, lambda = i, k = 2: both square roots of 1 at distance sqrt(2)") {
    const SymmetricAtomicMeasure m = shifted_Z_measure(kTrivial, 2, cplx(0.0, 1.0));
    REQUIRE(m.atoms.size() == 2);
    double weight = 0.0;
    for (const auto& a : m.atoms) {
      CHECK(a.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
      weight += a.weight;
    }
    CHECK(weight == doctest::Approx(1.0));
    CHECK(m.second_moment() == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("lambda = 0 sits at distance 1 from every root") {
    const SymmetricAtomicMeasure m = shifted_Z_measure(kTrivial, 5, cplx(0.0, 0.0));
    REQUIRE(m.atoms.size() == 5);
    for (const auto& a : m.atoms) CHECK(a.x == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("a two-atom initial law splits its weights across k roots") {
    InitialLaw law;
    law.atoms = {{1.0, 0.25}, {-0.5, 0.75}};
    const SymmetricAtomicMeasure m = shifted_Z_measure(law, 3, cplx(0.5, 0.2));
    REQUIRE(m.atoms.size() == 6);
    double weight = 0.0;
    for (const auto& a : m.atoms) weight += a.weight;
    CHECK(weight == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("semicircle H transform matches a discretized quarter-circle law") {
  // The symmetrized singular law of a variance-1 circular element is the
  // semicircle; 512 quantile atoms reproduce its H transform to the
  // discretization error.
  const SymmetricAtomicMeasure atoms = quarter_circle_atoms(512);
  CHECK(atoms.second_moment() == doctest::Approx(1.0).epsilon(1e-3));
  for (double y : {0.2, 0.7, 1.5, 4.0}) {
    const double discrete = h_transform(atoms, y).imag();
    const double exact = semicircle_h(1.0, y).imag();
    CHECK(discrete == doctest::Approx(exact).epsilon(2e-3));
  }
}

TEST_CASE("semicircle H transform closed values") {
  // H(iy) = i (sqrt(y^2 + 4v) - y)/2.
  CHECK(semicircle_h(1.0, 2.0).imag() ==
        doctest::Approx((std::sqrt(8.0) - 2.0) / 2.0).epsilon(1e-15));
  CHECK(semicircle_h(0.0, 3.0).imag() == doctest::Approx(0.0));
  CHECK_THROWS_AS(semicircle_h(1.0, 0.0), SpecError);
}

TEST_CASE("step H transform on the axis") {
  const double t = 1.8;
  const int k = 3;
  for (double y : {0.4, 1.0, 2.5}) {
    // Haar: point mass at sqrt(t/k) gives exactly (t/k)/y.
    CHECK(step_h_on_axis(StepLaw::haar(), k, t, y) ==
          doctest::Approx((t / k) / y).epsilon(1e-15));
    // An atomic law concentrated at 1 is the Haar singular law.
    SingularLaw one;
    one.atoms = {{1.0, 1.0}};
    CHECK(step_h_on_axis(StepLaw::atomic(one), k, t, y) ==
          doctest::Approx(step_h_on_axis(StepLaw::haar(), k, t, y)).epsilon(1e-13));
    // Circular: the semicircle transform with variance t/k.
    CHECK(step_h_on_axis(StepLaw::circular(), k, t, y) ==
          doctest::Approx(semicircle_h(t / k, y).imag()).epsilon(1e-15));
  }
}

TEST_CASE("principal k-th root lands in the first sector") {
  CHECK(std::abs(principal_kth_root(cplx(-1.0, 0.0), 2) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(principal_kth_root(cplx(-4.0, 0.0), 2) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(principal_kth_root(cplx(0.0, 0.0), 7)) == 0.0);
  for (int k : {1, 2, 3, 6}) {
    const cplx z(0.3, -1.1);
    const cplx root = principal_kth_root(z, k);
    CHECK(std::abs(std::pow(root, k) - z) < 1e-12);
    CHECK(std::arg(root) > -kPi / k - 1e-15);
    CHECK(std::arg(root) <= kPi / k + 1e-15);
  }
}

TEST_CASE("k = 2 circular fixed point against the quadratic closed form") {
  const StepLaw circ = StepLaw::circular();
  SUBCASE("on the negative axis eta = t/2 - 2") {
    // z = -1 has lifetime 4: below it no positive fixed point, above it the
    // closed form gives eta exactly.
    const EtaResult low = solve_eta_k(circ, kTrivial, 2, 2.0, cplx(-1.0, 0.0));
    CHECK(low.state == EtaResult::State::ExteriorZero);
    const EtaResult high = solve_eta_k(circ, kTrivial, 2, 5.0, cplx(-1.0, 0.0));
    REQUIRE(high.state == EtaResult::State::Interior);
    CHECK(high.eta == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("generic interior points") {
    for (const auto& [t, z] : std::vector<std::pair<double, cplx>>{
             {1.0, {0.25, 0.0}},
             {1.0, {0.9, 0.35}},
             {2.0, {1.0, 0.0}},
             {0.5, {0.95, 0.1}}}) {
      const EtaResult got = solve_eta_k(circ, kTrivial, 2, t, z);
      REQUIRE(got.state == EtaResult::State::Interior);
      CHECK(got.eta == doctest::Approx(eta_k2_circular_closed(t, z)).epsilon(1e-9));
    }
  }
}

TEST_CASE("haar fixed point tri-state on the negative axis") {
  const StepLaw haar = StepLaw::haar();
  const cplx z(-1.0, 0.0);
  // Lifetime of -1 at k = 2 is 4; the central disk reaches |lambda| = 1 at
  // t = 4 as well, so the ray passes from exterior directly to the disk.
  CHECK(solve_eta_k(haar, kTrivial, 2, 3.0, z).state == EtaResult::State::ExteriorZero);
  CHECK(solve_eta_k(haar, kTrivial, 2, 4.5, z).state == EtaResult::State::DiskInfinite);
}

TEST_CASE("generic solver agrees with the haar scalar equation") {
  const StepLaw haar = StepLaw::haar();
  InitialLaw two_atoms;
  two_atoms.atoms = {{0.9, 0.35}, {-1.8, 0.65}};
  RngStream rng(101);
  int interior_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const InitialLaw& law = (trial % 2 == 0) ? kTrivial : two_atoms;
    const int k = 1 + static_cast<int>(rng.next_u64() % 5);
    const double t = 0.2 + 4.0 * rng.uniform();
    const cplx z = std::polar(0.05 + 2.5 * rng.uniform(),
                              kPi * (2.0 * rng.uniform() - 1.0));
    if (std::abs(lifetime_k(law, k, z) - t) < 1e-3) continue;  // boundary band
    // Near the runaway threshold m2 = t/k the fixed point blows up and both
    // solvers lose conditioning; stay 10% clear of it.
    if (shifted_Z_measure(law, k, principal_kth_root(z, k)).second_moment() <
        1.1 * t / k) {
      continue;
    }
    const EtaResult generic = solve_eta_k(haar, law, k, t, z);
    const EtaResult scalar = eta_haar_scalar_equation(law, k, t, z);
    REQUIRE(generic.state == scalar.state);
    if (generic.state == EtaResult::State::Interior) {
      ++interior_seen;
      CHECK(generic.eta ==
            doctest::Approx(scalar.eta).epsilon(1e-10).scale(std::max(1.0, scalar.eta)));
    }
  }
  CHECK(interior_seen > 100);  // the sweep must actually exercise the solve
}

TEST_CASE("solver verdicts follow the lifetime geometry") {
  SingularLaw split;
  split.atoms = {{0.0, 0.5}, {std::sqrt(2.0), 0.5}};
  const std::vector<StepLaw> steps = {StepLaw::haar(), StepLaw::circular(),
                                      StepLaw::atomic(split)};
  RngStream rng(55);
  int interior = 0, exterior = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const StepLaw& step = steps[trial % steps.size()];
    const int k = 1 + static_cast<int>(rng.next_u64() % 4);
    const double t = 0.3 + 3.0 * rng.uniform();
    const cplx z = std::polar(0.1 + 2.2 * rng.uniform(),
                              kPi * (2.0 * rng.uniform() - 1.0));
    const double lifetime = lifetime_k(kTrivial, k, z);
    if (std::abs(lifetime - t) < 0.1) continue;  // stay clear of the boundary
    const EtaResult result = solve_eta_k(step, kTrivial, k, t, z);
    if (result.state == EtaResult::State::DiskInfinite) continue;
    if (lifetime < t) {
      CHECK(result.state == EtaResult::State::Interior);
      ++interior;
    } else {
      CHECK(result.state == EtaResult::State::ExteriorZero);
      ++exterior;
    }
  }
  CHECK(interior > 30);
  CHECK(exterior > 30);
}

TEST_CASE("periodized inverse-square kernel") {
  SUBCASE("closed form against a tail-completed direct sum") {
    for (double c : {0.3, 1.0, 2.5}) {
      for (double phi : {0.2, 1.5, 3.0}) {
        const long J = 10000;
        double direct = 0.0;
        for (long j = -J; j <= J; ++j) {
          const double u = 2.0 * kPi * j + phi;
          direct += 1.0 / (c * c + u * u);
        }
        // Both tails completed by the integral from J + 1/2 outward; the
        // midpoint rule's residual is O(J^-4), far below the tolerance.
        for (double sign : {1.0, -1.0}) {
          const double edge = 2.0 * kPi * (J + 0.5) + sign * phi;
          direct += (kPi / 2.0 - std::atan(edge / c)) / (2.0 * kPi * c);
        }
        CHECK(periodic_inverse_square_sum(c * c, phi) ==
              doctest::Approx(direct).epsilon(1e-10));
      }
    }
  }
  SUBCASE("the c -> 0 limit is the bare periodic kernel") {
    CHECK(periodic_inverse_square_sum(0.0, 1.0) ==
          doctest::Approx(1.0 / (2.0 * (1.0 - std::cos(1.0)))).epsilon(1e-12));
    CHECK(std::isinf(periodic_inverse_square_sum(0.0, 0.0)));
  }
}

TEST_CASE("limit solver: eta moves along the boundary level set") {
  // The defining equation depends on (rho, eta) only through rho^2 + eta, so
  // every interior point of a ray satisfies rho^2 + eta = log^2 R(t, theta)
  // with R the outer boundary radius.  This couples solve_eta_infinity to
  // the geometry with no shared code path.
  const double t = 1.0;
  for (double theta : {0.0, 0.3}) {
    const double R = sigma_infinity_boundary(kTrivial, t, theta);
    const double target = std::log(R) * std::log(R);
    for (double r : {0.9, 1.0, 1.1}) {
      const EtaResult res = solve_eta_infinity(kTrivial, t, std::polar(r, theta));
      REQUIRE(res.state == EtaResult::State::Interior);
      const double rho = std::log(r);
      CHECK(rho * rho + res.eta == doctest::Approx(target).epsilon(1e-10));
    }
  }
}

TEST_CASE("limit solver: exterior points report no fixed point") {
  // At t = 1 the angular window is |theta| < pi/3.
  CHECK(solve_eta_infinity(kTrivial, 1.0, std::polar(1.0, 1.2)).state ==
        EtaResult::State::ExteriorZero);
  CHECK(solve_eta_infinity(kTrivial, 1.0, std::polar(3.0, 0.0)).state ==
        EtaResult::State::ExteriorZero);
  CHECK_THROWS_AS(solve_eta_infinity(kTrivial, 1.0, cplx(0.0, 0.0)), SpecError);
}

TEST_CASE("rescaled finite-k eta converges to the limit") {
  // In the root plane the support shrinks toward the unit circle like 1/k,
  // and k^2 eta_k(z) approaches eta_infinity(z) for fixed z.
  const StepLaw haar = StepLaw::haar();
  const double t = 1.0;
  int tested = 0;
  for (double theta : {0.0, 0.25}) {
    for (double r : {0.95, 1.0, 1.08}) {
      const cplx z = std::polar(r, theta);
      const EtaResult limit = solve_eta_infinity(kTrivial, t, z);
      if (limit.state != EtaResult::State::Interior) continue;
      double first_gap = 0.0, last_gap = 0.0;
      bool all_interior = true;
      for (int k : {8, 16, 32, 64}) {
        const EtaResult res = solve_eta_k(haar, kTrivial, k, t, z);
        if (res.state != EtaResult::State::Interior) {
          all_interior = false;
          break;
        }
        last_gap = std::abs(k * static_cast<double>(k) * res.eta - limit.eta);
        if (k == 8) first_gap = last_gap;
      }
      REQUIRE(all_interior);
      CHECK(last_gap < first_gap);
      CHECK(last_gap <= 0.02 * limit.eta);
      ++tested;
    }
  }
  CHECK(tested >= 4);
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(solve_eta_k(StepLaw::haar(), kTrivial, 0, 1.0, cplx(0.5, 0.0)),
                  SpecError);
  CHECK_THROWS_AS(solve_eta_k(StepLaw::haar(), kTrivial, 2, 0.0, cplx(0.5, 0.0)),
                  SpecError);
  CHECK_THROWS_AS(cauchy_symmetric(pair_at_one(), 0.0), SpecError);
  SymmetricAtomicMeasure bad;
  bad.atoms = {{1.0, 0.7}};  // weights do not sum to 1
  CHECK_THROWS_AS(bad.validate(), SpecError);
}
