#include "limabean/matrix.hpp"

#include <cmath>
#include <string>

#include "limabean/errors.hpp"

// Route LAPACK's complex types onto std::complex so Eigen buffers can be
// handed to LAPACKE directly (both are column-major).
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace limabean {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw SpecError(std::string(who) + ": matrix must be square and non-empty, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw SpecError(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace

std::vector<cplx> eigenvalues(const ComplexMatrix& m) {
  require_square_finite(m, "eigenvalues");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  ComplexMatrix work = m;  // zgeev overwrites its input
  std::vector<cplx> w(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                    nullptr, 1, nullptr, 1);
  if (info < 0) {
    throw SolverError("eigenvalues: invalid argument " + std::to_string(-info) +
                      " passed to zgeev");
  }
  if (info > 0) {
    throw SolverError("eigenvalues: QR iteration failed to converge (" +
                      std::to_string(info) + " of " + std::to_string(n) +
                      " eigenvalues unresolved)");
  }
  return w;
}

double sigma_min(const ComplexMatrix& m) {
  require_square_finite(m, "sigma_min");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  ComplexMatrix work = m;  // zgesdd overwrites its input
  std::vector<double> s(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data(), n, s.data(),
                     nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw SolverError("sigma_min: zgesdd failed with info " + std::to_string(info));
  }
  return s.back();  // singular values come back in descending order
}

double hs_norm(const ComplexMatrix& m) {
  require_square_finite(m, "hs_norm");
  return std::sqrt(m.squaredNorm() / static_cast<double>(m.rows()));
}

}  // namespace limabean
