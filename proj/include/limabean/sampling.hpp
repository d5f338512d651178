#pragma once
#include "limabean/laws.hpp"
#include "limabean/matrix.hpp"
#include "limabean/rng.hpp"

namespace limabean {

// n x n matrix of iid complex Gaussian entries with E|g|^2 = 1/n, so the
// normalized second moment (1/n) E Tr(G G*) is 1 and the spectrum fills the
// unit disk as n grows.
ComplexMatrix sample_ginibre(int n, RngStream& rng);

// Hermitian Gaussian matrix with E|h_ij|^2 = 1/n: real N(0, 1/n) diagonal,
// complex off-diagonal entries of total variance 1/n.  The spectrum follows
// the semicircle law on [-2, 2].
ComplexMatrix sample_gue(int n, RngStream& rng);

// Haar-distributed unitary via QR of a Gaussian matrix with the R-diagonal
// phase correction (plain QR alone is not Haar).
ComplexMatrix sample_haar_unitary(int n, RngStream& rng);

// U diag(s) V* with U, V independent Haar unitaries.  By default the
// singular slots are the law's mid-point quantiles s_i = Q((i - 1/2)/n),
// which pins the empirical singular distribution to the law exactly;
// iid_draws = true samples each slot independently instead.
ComplexMatrix sample_bi_invariant(int n, const SingularLaw& law, RngStream& rng,
                                  bool iid_draws = false);

// One walk increment A with the given step law: a Haar unitary, a Ginibre
// matrix, or a bi-invariant matrix with atomic singular law.
ComplexMatrix sample_step(int n, const StepLaw& law, RngStream& rng);

}  // namespace limabean
