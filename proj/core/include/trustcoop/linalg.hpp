#pragma once

#include <utility>
#include <vector>

#include "trustcoop/types.hpp"

namespace trustcoop::linalg {

// Orthogonal projection of x onto span{basis}. Throws InvalidInput on a zero
// basis vector.
CVec project_onto(const CVec& x, const CVec& basis);

// (I - P) x, the component of x orthogonal to span{basis}.
CVec project_complement(const CVec& x, const CVec& basis);

// Rotates v by a unit phase so its first entry of non-negligible magnitude is
// real and positive. Identity for the zero vector.
CVec fix_phase(CVec v);

struct EigPair {
  double value = 0.0;
  CVec vector;
};

// Largest eigenpair of a Hermitian matrix. The returned vector is unit norm
// with the fix_phase convention; within a degenerate top eigenspace the
// vector closest to the first feasible canonical axis is chosen, so ties are
// deterministic (identity -> e1). Throws InvalidInput if m is not Hermitian
// to 1e-12 relative.
EigPair top_eigvec(const CMat& m);

// Hermitian positive semidefinite matrix, validated on construction:
// Hermitian to 1e-12 relative and eigenvalues >= -1e-10 * trace.
class HermitianPSD {
 public:
  explicit HermitianPSD(CMat m);
  const CMat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  CMat m_;
};

// Given nonzero PSD X and up to three Hermitian matrices A_i, returns z with
// tr(A_i z z^H) = tr(A_i X) for every i. Rank-one X returns its principal
// factor directly; higher ranks are reduced one step at a time by moving
// along a Hermitian direction that is annihilated by every trace functional
// restricted to the range of X. Throws NumericalError if the final vector
// misses a trace target by more than 1e-8 relative.
CVec rank_one_extract(const HermitianPSD& X, const std::vector<CMat>& A);

}  // namespace trustcoop::linalg
