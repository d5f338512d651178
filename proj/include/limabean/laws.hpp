#pragma once
#include <vector>

namespace limabean {

// Atomic law of a nonnegative singular value.  `normalized` declares the
// convention Sum w_i s_i^2 = 1 (unit second moment), which keeps the
// rescaled walk comparable across step laws; validate() enforces it.
struct SingularLaw {
  struct Atom {
    double value = 0.0;   // s_i >= 0
    double weight = 0.0;  // w_i > 0
  };
  std::vector<Atom> atoms;
  bool normalized = true;

  void validate() const;

  // Right-continuous inverse CDF: smallest atom value whose cumulative
  // weight reaches p.  Defined for p in [0, 1].
  double quantile(double p) const;

  double second_moment() const;  // Sum w_i s_i^2

  // Sum w_i / s_i^2, the squared L2 norm of the inverse; +infinity as soon
  // as any mass sits at zero.
  double inv_l2_sq() const;

  // Mass at zero, i.e. the weight of the kernel of a step.
  double kernel_mass() const;

  static SingularLaw point_mass_one();  // delta_1, the Haar-unitary singular law
};

// Atomic law of the initial unitary's spectrum, given by angles on the
// circle.  The trivial law delta_0 means the walk starts at the identity.
struct InitialLaw {
  struct Atom {
    double angle = 0.0;   // in (-pi, pi]
    double weight = 0.0;  // > 0
  };
  std::vector<Atom> atoms;

  void validate() const;
  bool is_trivial() const;  // single atom at angle 0

  static InitialLaw trivial();
};

// The two spectral statistics of a step law that the phase diagram needs.
// inv_l2_sq may be +infinity (non-invertible or heavy-at-zero steps).
struct StepLawSummary {
  double inv_l2_sq = 1.0;
  double kernel_mass = 0.0;
};

// Distribution of one multiplicative step.  All three kinds are unitarily
// bi-invariant: Haar unitaries, the circular (complex Gaussian) ensemble,
// and U diag(s) V* with atomic singular law s and independent Haar U, V.
struct StepLaw {
  enum class Kind { HaarUnitary, Circular, AtomicSingular };

  Kind kind = Kind::HaarUnitary;
  SingularLaw singular;  // used only when kind == AtomicSingular

  void validate() const;
  StepLawSummary summary() const;

  static StepLaw haar();
  static StepLaw circular();
  static StepLaw atomic(SingularLaw law);
};

const char* to_string(StepLaw::Kind kind);

}  // namespace limabean
