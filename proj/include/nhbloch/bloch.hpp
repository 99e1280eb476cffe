#pragma once

#include <vector>

#include "nhbloch/matrix.hpp"
#include "nhbloch/potential.hpp"

namespace nhbloch {

// Truncated momentum-space Hamiltonian over plane-wave indices m in [-M, M].
// Row/column index i maps to m = i - M.
struct BlochHamiltonian {
  double k = 0;     // crystal momentum, folded into [-0.5, 0.5]
  int truncation = 0;  // M
  Matrix entries;

  int dim() const { return 2 * truncation + 1; }
  int index_to_m(int i) const { return i - truncation; }
};

struct BandStructure {
  std::vector<double> k_grid;
  // energies[ik][band], band labels assigned by eigenvector-overlap
  // continuation across the k grid.
  std::vector<cvec> energies;
  int band_count = 0;
  // coefficient vectors a_m, dimension 2M+1; empty if not requested
  std::vector<std::vector<cvec>> eigenvectors;
};

double fold_to_first_bz(double k);

// H[m,m'] = (m+k)^2 delta_{mm'} + c_{m-m'}. Throws std::invalid_argument if
// M is smaller than the potential bandwidth. k outside [-0.5, 0.5] is folded
// with a warning on stderr.
BlochHamiltonian build_bloch(const PotentialSpec& potential, double k, int M);

}  // namespace nhbloch
