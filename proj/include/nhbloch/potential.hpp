#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "nhbloch/matrix.hpp"

namespace nhbloch {

// Periodic complex potential V(x) = sum_m c_m e^{imx}, period fixed to 2*pi.
// Coefficient maps are pruned of exact zeros on construction and immutable
// afterwards.
class PotentialSpec {
 public:
  using CoeffMap = std::map<int, cxd>;

  PotentialSpec(CoeffMap coefficients, double period = kDefaultPeriod,
                std::string label = {});

  // V0(cos x + i*tau*sin x): asymmetric NN couplings t_pm = V0(1 +/- tau)/2.
  static PotentialSpec v1(double v0, double tau);
  // v1 plus the m = +/-2 copy with the same coupling asymmetry.
  static PotentialSpec v1_plus_v2(double v0, double tau);
  // v1 plus V0[(1+tau^2)cos 2x + 2*tau*i*sin 2x]; the NNN couplings
  // t'_pm = V0(1 +/- tau)^2/2 satisfy the gauge-matching condition.
  static PotentialSpec v1_nnn_matched(double v0, double tau);

  const CoeffMap& coefficients() const { return coeffs_; }
  double period() const { return period_; }
  const std::string& label() const { return label_; }

  cxd coefficient(int m) const {
    auto it = coeffs_.find(m);
    return it == coeffs_.end() ? cxd{} : it->second;
  }

  // Largest |m| with a nonzero coefficient; 0 for the empty potential.
  int bandwidth() const;

  cxd evaluate(double x) const;

  std::string to_json() const;
  static PotentialSpec from_json(const std::string& text);

  static constexpr double kDefaultPeriod = 6.283185307179586476925286766559;

 private:
  CoeffMap coeffs_;
  double period_;
  std::string label_;
};

// True iff every Fourier coefficient is real to 1e-14, which is equivalent
// to V(x) = V*(-x).
bool pt_symmetric(const PotentialSpec& potential);

}  // namespace nhbloch
