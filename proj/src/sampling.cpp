#include "limabean/sampling.hpp"

#include <cmath>

#include "limabean/errors.hpp"

namespace limabean {

namespace {

void require_positive_dim(int n, const char* who) {
  if (n <= 0) throw SpecError(std::string(who) + ": dimension must be positive");
}

}  // namespace

ComplexMatrix sample_ginibre(int n, RngStream& rng) {
  require_positive_dim(n, "sample_ginibre");
  ComplexMatrix g(n, n);
  const double variance = 1.0 / static_cast<double>(n);
  // Column-major fill keeps the draw order independent of how callers
  // traverse the result.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.complex_normal(variance);
  }
  return g;
}

ComplexMatrix sample_gue(int n, RngStream& rng) {
  require_positive_dim(n, "sample_gue");
  ComplexMatrix h(n, n);
  const double variance = 1.0 / static_cast<double>(n);
  const double diag_sd = std::sqrt(variance);
  for (int j = 0; j < n; ++j) {
    h(j, j) = cplx(diag_sd * rng.normal(), 0.0);
    for (int i = j + 1; i < n; ++i) {
      const cplx w = rng.complex_normal(variance);
      h(i, j) = w;
      h(j, i) = std::conj(w);
    }
  }
  return h;
}

ComplexMatrix sample_haar_unitary(int n, RngStream& rng) {
  require_positive_dim(n, "sample_haar_unitary");
  const ComplexMatrix g = sample_ginibre(n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Multiply each column of Q by the phase of the matching R diagonal;
  // without this the distribution depends on the QR pivoting convention.
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    const cplx phase = mag > 0.0 ? d / mag : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

ComplexMatrix sample_bi_invariant(int n, const SingularLaw& law, RngStream& rng,
                                  bool iid_draws) {
  require_positive_dim(n, "sample_bi_invariant");
  law.validate();
  const ComplexMatrix u = sample_haar_unitary(n, rng);
  const ComplexMatrix v = sample_haar_unitary(n, rng);
  Eigen::VectorXd s(n);
  if (iid_draws) {
    for (int i = 0; i < n; ++i) s(i) = law.quantile(rng.uniform());
  } else {
    for (int i = 0; i < n; ++i) {
      s(i) = law.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
  }
  return u * s.asDiagonal().toDenseMatrix().cast<cplx>() * v.adjoint();
}

ComplexMatrix sample_step(int n, const StepLaw& law, RngStream& rng) {
  law.validate();
  switch (law.kind) {
    case StepLaw::Kind::HaarUnitary:
      return sample_haar_unitary(n, rng);
    case StepLaw::Kind::Circular:
      return sample_ginibre(n, rng);
    case StepLaw::Kind::AtomicSingular:
      return sample_bi_invariant(n, law.singular, rng);
  }
  throw SpecError("sample_step: unknown step law kind");
}

}  // namespace limabean
