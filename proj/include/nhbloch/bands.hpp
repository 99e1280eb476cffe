#pragma once

#include <vector>

#include "nhbloch/bloch.hpp"
#include "nhbloch/matrix.hpp"
#include "nhbloch/potential.hpp"

namespace nhbloch {

struct TailFit {
  enum class Verdict { SuperExponential, NotSuperExponential, Inconclusive };
  double quadratic_coeff = 0;
  double linear_coeff = 0;
  double constant_coeff = 0;
  double rms_residual = 0;
  int points_used = 0;
  Verdict verdict = Verdict::Inconclusive;
};

// Lowest n_bands eigenvalues (and coefficient vectors) per k. Band labels are
// made consistent across the grid by maximal eigenvector overlap with the
// previous k point. threads > 1 parallelizes over k.
BandStructure band_sweep(const PotentialSpec& potential, const std::vector<double>& k_grid,
                         int M, int n_bands, bool want_vectors = true, int threads = 1);

// Independent real-space check: second-order central differences on N grid
// points over one period with Bloch-phase wrap-around. Returns the lowest
// n_bands eigenvalues in canonical order.
cvec fd_band_oracle(const PotentialSpec& potential, double k, int N, int n_bands);

// (sum |a|^2)^2 / sum |a|^4, in [1, length]. Throws on the zero vector.
double participation_ratio(const cvec& coeffs);

// psi(x) = e^{ikx} sum_m a_m e^{imx}; coeffs indexed m = i - M, odd length.
cvec reconstruct_wavefunction(const cvec& coeffs, double k,
                              const std::vector<double>& x_grid);

// Least-squares fit of ln|a_m| against {1, m, m^2} over the decaying tail
// (entries above 1e-13, from the peak outward).
TailFit tail_profile(const cvec& coeffs);

// Double M starting from m_start until the first n_bands energies at k move
// by less than 1e-10.
int converged_truncation(const PotentialSpec& potential, double k, int n_bands,
                         int m_start = 32);

}  // namespace nhbloch
