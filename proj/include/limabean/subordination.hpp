#pragma once
#include <vector>

#include "limabean/laws.hpp"
#include "limabean/matrix.hpp"

namespace limabean {

// Symmetric atomic measure on the real line: each atom (x, w) carries mass
// w/2 at +x and -x (all of w at 0 when x = 0).  These are the symmetrized
// singular-value laws the subordination machinery runs on.
struct SymmetricAtomicMeasure {
  struct Atom {
    double x = 0.0;       // >= 0
    double weight = 0.0;  // > 0
  };
  std::vector<Atom> atoms;

  void validate() const;
  double second_moment() const;  // Sum w x^2
};

// Outcome of a fixed-point solve for the regularization parameter eta at a
// query point z.  Interior means a positive fixed point exists (z carries
// density); ExteriorZero means the only fixed point is 0 (z outside the
// support); DiskInfinite means the fixed point runs away to infinity, which
// happens exactly on the central disk that reappears at large t.
struct EtaResult {
  enum class State { Interior, ExteriorZero, DiskInfinite };
  State state = State::ExteriorZero;
  double eta = 0.0;  // meaningful only in the Interior state
  int iterations = 0;
  double residual = 0.0;  // |fixed-point defect| at the returned value
};

// Cauchy transform G(iy) = -i Sum w y/(y^2 + x^2) of a symmetric atomic
// measure, evaluated on the positive imaginary axis where symmetry keeps
// every iterate.  Purely imaginary with strictly negative imaginary part.
cplx cauchy_symmetric(const SymmetricAtomicMeasure& m, double y);

// H(iy) = 1/G(iy) - iy; purely imaginary with nonnegative imaginary part.
cplx h_transform(const SymmetricAtomicMeasure& m, double y);

// Law of |lambda - Z| where Z^k has the given initial spectrum: atoms
// |lambda - e^{i(theta_i + 2 pi j)/k}| for j = 0..k-1 with weights w_i/k.
SymmetricAtomicMeasure shifted_Z_measure(const InitialLaw& law, int k,
                                         cplx lambda);

// H transform of the semicircle law with variance v (the symmetrized
// singular law of a sqrt(v)-scaled circular element):
// H(iy) = i (sqrt(y^2 + 4v) - y)/2.
cplx semicircle_h(double variance, double y);

// H transform of one rescaled walk step sqrt(t/k) a on the imaginary axis,
// as a function of y > 0.
double step_h_on_axis(const StepLaw& step, int k, double t, double y);

// Principal k-th root: argument in (-pi/k, pi/k].
cplx principal_kth_root(cplx z, int k);

// The regularization parameter eta_k(t, z) of the k-step walk at z, found
// as the attracting fixed point of the composed H transforms restricted to
// the imaginary axis: y* >= 0 with i y* = H_step(H_{|Z - lambda|}(i y*)),
// eta = y*^2.  Dispatches to the tri-state result described on EtaResult.
EtaResult solve_eta_k(const StepLaw& step, const InitialLaw& law, int k,
                      double t, cplx z);

// Haar-step fast path: the fixed point reduces to the scalar equation
// Sum_i W_i/(s_i^2 + eta) = 1/(eta + t/k) over the shifted-Z atoms.
// Must agree with solve_eta_k; the generic solver remains the arbiter.
EtaResult eta_haar_scalar_equation(const InitialLaw& law, int k, double t,
                                   cplx z);

// Periodized inverse-square kernel S(c^2; phi) = Sum_{j in Z}
// 1/(c^2 + (2 pi j + phi)^2) = sinh(c)/(2c(cosh c - cos phi)).
double periodic_inverse_square_sum(double c_sq, double phi);

// The k -> infinity regularization parameter: root of
// Sum_i w_i S(rho^2 + eta; theta - theta_i) = 1/t with z = e^rho e^{i theta}.
EtaResult solve_eta_infinity(const InitialLaw& law, double t, cplx z);

}  // namespace limabean
