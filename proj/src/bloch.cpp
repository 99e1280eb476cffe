#include "nhbloch/bloch.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nhbloch {

double fold_to_first_bz(double k) {
  double folded = k - std::round(k);
  if (folded == -0.5) folded = 0.5;  // keep the +0.5 edge representative
  return folded;
}

BlochHamiltonian build_bloch(const PotentialSpec& potential, double k, int M) {
  if (M < 1) throw std::invalid_argument("build_bloch: truncation M must be >= 1");
  const int bw = potential.bandwidth();
  if (M < bw)
    throw std::invalid_argument("build_bloch: truncation M=" + std::to_string(M) +
                                " is smaller than the potential bandwidth " + std::to_string(bw));
  if (std::abs(k) > 0.5 + 1e-15) {
    const double folded = fold_to_first_bz(k);
    std::fprintf(stderr, "build_bloch: k=%g outside [-0.5, 0.5], folded to %g\n", k, folded);
    k = folded;
  }

  BlochHamiltonian h;
  h.k = k;
  h.truncation = M;
  const int n = 2 * M + 1;
  h.entries = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    const int m = i - M;
    h.entries(i, i) = (m + k) * (m + k) + potential.coefficient(0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      h.entries(i, j) = potential.coefficient(m - (j - M));
    }
  }
  return h;
}

}  // namespace nhbloch
