#include "limabean/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "limabean/errors.hpp"

namespace limabean {

namespace {
constexpr double kWeightTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

void SingularLaw::validate() const {
  if (atoms.empty()) throw SpecError("SingularLaw: no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.value >= 0.0) || !std::isfinite(a.value)) {
      throw SpecError("SingularLaw: atom values must be finite and >= 0");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw SpecError("SingularLaw: atom weights must be finite and > 0");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    throw SpecError("SingularLaw: weights sum to " + std::to_string(total) +
                    ", expected 1");
  }
  if (normalized && std::abs(second_moment() - 1.0) > kWeightTol) {
    throw SpecError("SingularLaw: second moment is " +
                    std::to_string(second_moment()) +
                    " but the law is declared normalized");
  }
}

double SingularLaw::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw SpecError("SingularLaw::quantile: p must lie in [0, 1]");
  }
  std::vector<Atom> sorted = atoms;
  std::sort(sorted.begin(), sorted.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double cum = 0.0;
  for (const auto& a : sorted) {
    cum += a.weight;
    if (cum >= p - kWeightTol) return a.value;
  }
  return sorted.back().value;
}

double SingularLaw::second_moment() const {
  double m2 = 0.0;
  for (const auto& a : atoms) m2 += a.weight * a.value * a.value;
  return m2;
}

double SingularLaw::inv_l2_sq() const {
  double sum = 0.0;
  for (const auto& a : atoms) {
    if (a.value == 0.0) return std::numeric_limits<double>::infinity();
    sum += a.weight / (a.value * a.value);
  }
  return sum;
}

double SingularLaw::kernel_mass() const {
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (a.value == 0.0) mass += a.weight;
  }
  return mass;
}

SingularLaw SingularLaw::point_mass_one() {
  SingularLaw law;
  law.atoms = {{1.0, 1.0}};
  law.normalized = true;
  return law;
}

void InitialLaw::validate() const {
  if (atoms.empty()) throw SpecError("InitialLaw: no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.angle > -kPi - kWeightTol) || !(a.angle <= kPi + kWeightTol)) {
      throw SpecError("InitialLaw: angles must lie in (-pi, pi]");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw SpecError("InitialLaw: atom weights must be finite and > 0");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    throw SpecError("InitialLaw: weights sum to " + std::to_string(total) +
                    ", expected 1");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (std::abs(atoms[i].angle - atoms[j].angle) < kWeightTol) {
        throw SpecError("InitialLaw: duplicate atom angles");
      }
    }
  }
}

bool InitialLaw::is_trivial() const {
  return atoms.size() == 1 && atoms[0].angle == 0.0;
}

InitialLaw InitialLaw::trivial() {
  InitialLaw law;
  law.atoms = {{0.0, 1.0}};
  return law;
}

void StepLaw::validate() const {
  if (kind == Kind::AtomicSingular) singular.validate();
}

StepLawSummary StepLaw::summary() const {
  switch (kind) {
    case Kind::HaarUnitary:
      return {1.0, 0.0};
    case Kind::Circular:
      // The limiting squared-singular distribution of a normalized complex
      // Gaussian matrix puts too much mass near zero for the inverse to be
      // L2: the hard-edge density behaves like 1/sqrt(x).
      return {std::numeric_limits<double>::infinity(), 0.0};
    case Kind::AtomicSingular:
      return {singular.inv_l2_sq(), singular.kernel_mass()};
  }
  throw SpecError("StepLaw: unknown kind");
}

StepLaw StepLaw::haar() {
  StepLaw law;
  law.kind = Kind::HaarUnitary;
  law.singular = SingularLaw::point_mass_one();
  return law;
}

StepLaw StepLaw::circular() {
  StepLaw law;
  law.kind = Kind::Circular;
  return law;
}

StepLaw StepLaw::atomic(SingularLaw singular_law) {
  StepLaw law;
  law.kind = Kind::AtomicSingular;
  law.singular = std::move(singular_law);
  law.singular.validate();
  return law;
}

const char* to_string(StepLaw::Kind kind) {
  switch (kind) {
    case StepLaw::Kind::HaarUnitary: return "haar-unitary";
    case StepLaw::Kind::Circular: return "circular";
    case StepLaw::Kind::AtomicSingular: return "atomic-singular";
  }
  return "unknown";
}

}  // namespace limabean
