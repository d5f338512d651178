#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace limabean {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Eigenvalues of a dense complex matrix, with multiplicity.  Order is
// deterministic for identical input but otherwise unspecified.  Throws
// SolverError if the QR iteration fails to converge and SpecError for
// empty or non-finite input.
std::vector<cplx> eigenvalues(const ComplexMatrix& m);

// Smallest singular value.
double sigma_min(const ComplexMatrix& m);

// Normalized Hilbert-Schmidt norm sqrt((1/n) Tr(m* m)), i.e. the L2 norm
// under the normalized trace.
double hs_norm(const ComplexMatrix& m);

}  // namespace limabean
