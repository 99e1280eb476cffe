#include "nhbloch/gauge.hpp"

#include <cmath>
#include <stdexcept>

namespace nhbloch {

namespace {
constexpr double kHalfPi = 1.5707963267948966192313216916398;
}

GaugeAngle gauge_angle(double t_minus, double t_plus) {
  if (t_plus == 0) throw std::invalid_argument("gauge_angle: t_+ must be nonzero");
  GaugeAngle g;
  if (t_minus == 0) {
    g.regime = GaugeRegime::Undefined;  // the angle theta is undefined
    return g;
  }
  const double ratio = t_plus / t_minus;
  if (ratio > 0) {
    g.regime = GaugeRegime::Imaginary;
    g.theta = cxd(0.0, 0.5 * std::log(ratio));
  } else {
    // branch with Re theta = +pi/2
    g.regime = GaugeRegime::Complex;
    g.theta = cxd(kHalfPi, 0.5 * std::log(-ratio));
  }
  return g;
}

BlochHamiltonian apply_gauge(const BlochHamiltonian& h, const GaugeAngle& theta) {
  if (theta.regime == GaugeRegime::Undefined)
    throw std::invalid_argument("apply_gauge: the gauge angle is undefined (t_- = 0)");
  BlochHamiltonian out = h;
  const int n = h.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;  // diagonal preserved exactly
      const int dm = h.index_to_m(i) - h.index_to_m(j);
      out.entries(i, j) = h.entries(i, j) * std::exp(cxd(0.0, 1.0) * (double(dm) * theta.theta));
    }
  }
  return out;
}

cvec gauge_factors(int M, const GaugeAngle& theta) {
  cvec f(2 * M + 1);
  for (int i = 0; i < 2 * M + 1; ++i)
    f[i] = std::exp(cxd(0.0, 1.0) * (double(i - M) * theta.theta));
  return f;
}

bool symmetrizable(const PotentialSpec& potential) {
  if (potential.bandwidth() > 2)
    throw std::invalid_argument(
        "symmetrizable: unsupported bandwidth (only NN + NNN potentials, |m| <= 2)");
  const cxd c1p = potential.coefficient(+1);
  const cxd c1m = potential.coefficient(-1);
  if (c1p == cxd{}) throw std::invalid_argument("symmetrizable: c_{+1} must be nonzero");
  if (c1m == cxd{}) return false;  // s = 0, transform degenerates
  const cxd c2p = potential.coefficient(+2);
  const cxd c2m = potential.coefficient(-2);
  if (c2p == cxd{} && c2m == cxd{}) return true;
  if (c2p == cxd{} || c2m == cxd{}) return false;
  const cxd s4 = (c1m / c1p) * (c1m / c1p);  // s^4 with s = sqrt(c_{-1}/c_{+1})
  return std::abs(c2m - s4 * c2p) <= 1e-12 * std::abs(c2m);
}

EquivalenceResult hermitian_equivalent(const PotentialSpec& potential) {
  if (!symmetrizable(potential))
    throw std::invalid_argument(
        "hermitian_equivalent: potential is not symmetrizable (NNN couplings violate "
        "c_{-2} = s^4 c_{+2}, or c_{-1} = 0)");
  const cxd nn = potential.coefficient(+1) * potential.coefficient(-1);
  const cxd nnn = potential.coefficient(+2) * potential.coefficient(-2);
  PotentialSpec::CoeffMap c;
  if (potential.coefficient(0) != cxd{}) c[0] = potential.coefficient(0);
  const cxd t = std::sqrt(nn);  // principal root
  c[+1] = c[-1] = t;
  if (nnn != cxd{}) c[+2] = c[-2] = std::sqrt(nnn);
  EquivalenceResult r;
  r.eligible = true;
  r.character = (nn.real() >= 0) ? EquivalentCharacter::RealHermitian
                                 : EquivalentCharacter::PurelyImaginary;
  r.transformed_potential = PotentialSpec(std::move(c), potential.period(),
                                          potential.label().empty()
                                              ? std::string("equivalent")
                                              : potential.label() + "~");
  return r;
}

OffDiagonalForm off_diagonal_form(const PotentialSpec& potential) {
  if (!pt_symmetric(potential))
    throw std::invalid_argument("off_diagonal_form: potential must be PT-symmetric");
  OffDiagonalForm f;
  f.nn_minus = potential.coefficient(-1).real();
  f.nn_plus = potential.coefficient(+1).real();
  f.nnn_minus = potential.coefficient(-2).real();
  f.nnn_plus = potential.coefficient(+2).real();
  f.has_nnn = f.nnn_minus != 0 || f.nnn_plus != 0;
  return f;
}

Matrix dirichlet_negative_control(double v0, double tau, int N) {
  if (N < 4) throw std::invalid_argument("dirichlet_negative_control: N must be >= 4");
  const double v = v0 / 2.0;
  Matrix h(N, N);
  for (int i = 0; i < N; ++i) {
    const double m = i + 1;
    h(i, i) = (m / 2.0) * (m / 2.0);
    if (i + 1 < N) h(i, i + 1) = h(i + 1, i) = cxd(0.0, tau * v);
    if (i + 2 < N) h(i, i + 2) = h(i + 2, i) = v;
  }
  h(0, 0) -= v;  // sin^2(x/2) overlap with cos x contributes -V0/2
  return h;
}

const char* to_string(GaugeRegime r) {
  switch (r) {
    case GaugeRegime::Imaginary: return "imaginary";
    case GaugeRegime::Complex: return "complex";
    default: return "undefined";
  }
}

const char* to_string(EquivalentCharacter c) {
  return c == EquivalentCharacter::RealHermitian ? "real_hermitian" : "purely_imaginary";
}

}  // namespace nhbloch
