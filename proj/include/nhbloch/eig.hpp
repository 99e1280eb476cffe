#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nhbloch/matrix.hpp"

namespace nhbloch {

struct EigenDecomposition {
  cvec eigenvalues;                       // canonical order: ascending (Re, Im)
  std::vector<cvec> right_eigenvectors;   // unit norm, largest entry real positive
  std::vector<double> residuals;          // ||H v - lambda v||_2 per pair
};

// QR iteration exhausted its sweep budget; [block_lo, block_hi] is the
// deflation block that failed to converge.
struct EigError : std::runtime_error {
  EigError(const std::string& what, int lo, int hi)
      : std::runtime_error(what), block_lo(lo), block_hi(hi) {}
  int block_lo;
  int block_hi;
};

// Dense non-Hermitian eigendecomposition: balancing, Householder reduction to
// Hessenberg, implicitly restarted single-shift QR with Wilkinson shifts, then
// eigenvectors by triangular back-substitution on the Schur factor (with an
// inverse-iteration refinement pass when the residual contract is missed).
EigenDecomposition eig(const Matrix& a);

// Eigenvalues only (no Schur vector accumulation).
cvec eig_values_only(const Matrix& a);

// Canonical comparison: ascending real part, ties by ascending imaginary part.
bool canonical_less(const cxd& a, const cxd& b);

}  // namespace nhbloch
