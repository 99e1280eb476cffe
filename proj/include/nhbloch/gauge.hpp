#pragma once

#include <optional>

#include "nhbloch/bloch.hpp"
#include "nhbloch/matrix.hpp"
#include "nhbloch/potential.hpp"

namespace nhbloch {

enum class GaugeRegime { Imaginary, Complex, Undefined };

// theta = (i/2) ln(t_+/t_-). Purely imaginary for t_-*t_+ > 0; for negative
// products the branch with Re theta = +pi/2 is used. t_- = 0 leaves the angle
// undefined and the transform refused.
struct GaugeAngle {
  cxd theta;
  GaugeRegime regime = GaugeRegime::Undefined;
};

enum class EquivalentCharacter { RealHermitian, PurelyImaginary };

struct EquivalenceResult {
  bool eligible = false;
  std::optional<PotentialSpec> transformed_potential;
  EquivalentCharacter character = EquivalentCharacter::RealHermitian;
};

struct OffDiagonalForm {
  // H[m, m+1] / H[m, m-1] coupling pairs read off the coefficient map
  double nn_minus = 0, nn_plus = 0;
  double nnn_minus = 0, nnn_plus = 0;
  bool has_nnn = false;
};

GaugeAngle gauge_angle(double t_minus, double t_plus);

// G H G^{-1} with G = diag(e^{im*theta}); diagonal entries untouched exactly.
// Throws std::invalid_argument in the Undefined regime.
BlochHamiltonian apply_gauge(const BlochHamiltonian& h, const GaugeAngle& theta);

// Gauge vector factors e^{im*theta} for m in [-M, M]; applied entrywise to a
// coefficient vector this is the wavefunction side of the transform.
cvec gauge_factors(int M, const GaugeAngle& theta);

// NN + NNN potentials only: true iff s = sqrt(c_{-1}/c_{+1}) exists and the
// NNN couplings (if any) satisfy c_{-2} = s^4 c_{+2}.
bool symmetrizable(const PotentialSpec& potential);

// Map an eligible potential to its symmetric-coupling equivalent:
// c~_{+-1} = sqrt(c_{+1} c_{-1}), c~_{+-2} = sqrt(c_{+2} c_{-2}).
EquivalenceResult hermitian_equivalent(const PotentialSpec& potential);

// Report the asymmetric coupling pairs of a PT-symmetric potential, i.e. its
// Bloch Hamiltonian read as a lattice model with off-diagonal non-Hermiticity.
OffDiagonalForm off_diagonal_form(const PotentialSpec& potential);

// Standing-wave-basis matrix for V(x) = V0[cos x + i*tau*cos(x/2)] with
// Dirichlet boundary conditions, basis sin(m x / 2), m = 1..N. All coupling
// pairs are symmetric for every tau, so no imaginary gauge transform can act.
Matrix dirichlet_negative_control(double v0, double tau, int N);

const char* to_string(GaugeRegime r);
const char* to_string(EquivalentCharacter c);

}  // namespace nhbloch
