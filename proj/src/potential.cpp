#include "nhbloch/potential.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

namespace nhbloch {

namespace {
constexpr double kPruneThreshold = 1e-300;  // exact zeros only
}

PotentialSpec::PotentialSpec(CoeffMap coefficients, double period, std::string label)
    : coeffs_(std::move(coefficients)), period_(period), label_(std::move(label)) {
  if (!(period_ > 0)) throw std::invalid_argument("PotentialSpec: period must be positive");
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) < kPruneThreshold)
      it = coeffs_.erase(it);
    else
      ++it;
  }
}

PotentialSpec PotentialSpec::v1(double v0, double tau) {
  CoeffMap c;
  c[+1] = v0 * (1.0 + tau) / 2.0;
  c[-1] = v0 * (1.0 - tau) / 2.0;
  return PotentialSpec(std::move(c), kDefaultPeriod, "V1");
}

PotentialSpec PotentialSpec::v1_plus_v2(double v0, double tau) {
  CoeffMap c;
  c[+1] = v0 * (1.0 + tau) / 2.0;
  c[-1] = v0 * (1.0 - tau) / 2.0;
  c[+2] = v0 * (1.0 + tau) / 2.0;
  c[-2] = v0 * (1.0 - tau) / 2.0;
  return PotentialSpec(std::move(c), kDefaultPeriod, "V1+V2");
}

PotentialSpec PotentialSpec::v1_nnn_matched(double v0, double tau) {
  CoeffMap c;
  c[+1] = v0 * (1.0 + tau) / 2.0;
  c[-1] = v0 * (1.0 - tau) / 2.0;
  c[+2] = v0 * (1.0 + tau) * (1.0 + tau) / 2.0;
  c[-2] = v0 * (1.0 - tau) * (1.0 - tau) / 2.0;
  return PotentialSpec(std::move(c), kDefaultPeriod, "fig5");
}

int PotentialSpec::bandwidth() const {
  int bw = 0;
  for (const auto& [m, c] : coeffs_) bw = std::max(bw, std::abs(m));
  return bw;
}

cxd PotentialSpec::evaluate(double x) const {
  cxd v{};
  for (const auto& [m, c] : coeffs_) v += c * std::exp(cxd(0.0, m * x));
  return v;
}

std::string PotentialSpec::to_json() const {
  nlohmann::json j;
  j["label"] = label_;
  j["period"] = period_;
  j["coefficients"] = nlohmann::json::array();
  for (const auto& [m, c] : coeffs_)
    j["coefficients"].push_back({{"m", m}, {"re", c.real()}, {"im", c.imag()}});
  return j.dump(2);
}

PotentialSpec PotentialSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CoeffMap c;
  for (const auto& e : j.at("coefficients"))
    c[e.at("m").get<int>()] += cxd(e.at("re").get<double>(), e.at("im").get<double>());
  return PotentialSpec(std::move(c), j.value("period", kDefaultPeriod), j.value("label", std::string{}));
}

bool pt_symmetric(const PotentialSpec& potential) {
  for (const auto& [m, c] : potential.coefficients())
    if (std::abs(c.imag()) > 1e-14) return false;
  return true;
}

}  // namespace nhbloch
