#include <doctest.h>

#include <cmath>
#include <random>

#include "nhbloch/bloch.hpp"
#include "nhbloch/potential.hpp"

using namespace nhbloch;

TEST_CASE("build_bloch assembles V1(1, 0.8) at k=0, M=2") {
  const auto h = build_bloch(PotentialSpec::v1(1.0, 0.8), 0.0, 2);
  REQUIRE(h.dim() == 5);
  const double diag[5] = {4, 1, 0, 1, 4};
  for (int i = 0; i < 5; ++i) {
    CHECK(h.entries(i, i) == cxd(diag[i]));
    for (int j = 0; j < 5; ++j) {
      // 1 - 0.8 rounds, so the coupling is 0.1 only to machine precision
      if (j == i + 1) CHECK(std::abs(h.entries(i, j) - cxd(0.1)) < 1e-16);  // t_-
      if (j == i - 1) CHECK(std::abs(h.entries(i, j) - cxd(0.9)) < 1e-16);  // t_+
      if (std::abs(i - j) > 1) CHECK(h.entries(i, j) == cxd(0.0));
    }
  }
}

TEST_CASE("build_bloch Hermitian limit tau=0 at k=0.25, M=1") {
  const auto h = build_bloch(PotentialSpec::v1(1.0, 0.0), 0.25, 1);
  CHECK(h.entries(0, 0) == cxd(0.5625));
  CHECK(h.entries(1, 1) == cxd(0.0625));
  CHECK(h.entries(2, 2) == cxd(1.5625));
  CHECK(h.entries(0, 1) == cxd(0.5));
  CHECK(h.entries(1, 0) == cxd(0.5));
  CHECK(h.entries(1, 2) == cxd(0.5));
  CHECK(h.entries(2, 1) == cxd(0.5));
}

TEST_CASE("build_bloch maximally asymmetric V1+V2 at tau=1") {
  const auto h = build_bloch(PotentialSpec::v1_plus_v2(1.0, 1.0), 0.0, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (j == i + 1 || j == i + 2) CHECK(h.entries(i, j) == cxd(0.0));
      if (j == i - 1 || j == i - 2) CHECK(h.entries(i, j) == cxd(1.0));
    }
}

TEST_CASE("build_bloch rejects too-small truncation") {
  CHECK_THROWS_AS(build_bloch(PotentialSpec::v1_plus_v2(1.0, 0.5), 0.0, 1),
                  std::invalid_argument);
}

TEST_CASE("pt_symmetric predicate") {
  CHECK(pt_symmetric(PotentialSpec::v1(1.0, 0.8)));
  CHECK(pt_symmetric(PotentialSpec::v1_nnn_matched(1.0, 0.5)));
  PotentialSpec::CoeffMap c;
  c[1] = cxd(0.0, 1.0);
  CHECK_FALSE(pt_symmetric(PotentialSpec(std::move(c))));
}

TEST_CASE("zero coefficients are pruned, tiny ones kept") {
  PotentialSpec::CoeffMap c;
  c[1] = 0.0;
  c[2] = 1e-200;
  const PotentialSpec p(std::move(c));
  CHECK(p.coefficients().size() == 1);
  CHECK(p.bandwidth() == 2);
}

TEST_CASE("assembly is idempotent") {
  const auto p = PotentialSpec::v1_plus_v2(1.3, 0.4);
  const auto h1 = build_bloch(p, 0.21, 6);
  const auto h2 = build_bloch(p, 0.21, 6);
  CHECK(h1.entries == h2.entries);
}

TEST_CASE("Hermiticity corresponds to c_{-m} = conj(c_m)") {
  auto hermitian = [](const BlochHamiltonian& h) {
    for (int i = 0; i < h.dim(); ++i)
      for (int j = 0; j < h.dim(); ++j)
        if (std::abs(h.entries(i, j) - std::conj(h.entries(j, i))) > 0) return false;
    return true;
  };
  CHECK(hermitian(build_bloch(PotentialSpec::v1(1.0, 0.0), 0.1, 4)));
  CHECK_FALSE(hermitian(build_bloch(PotentialSpec::v1(1.0, 0.5), 0.1, 4)));
  PotentialSpec::CoeffMap c;  // c_{-1} = conj(c_1), complex
  c[1] = cxd(0.3, 0.4);
  c[-1] = cxd(0.3, -0.4);
  CHECK(hermitian(build_bloch(PotentialSpec(std::move(c)), 0.2, 4)));
}

TEST_CASE("PT-symmetric potentials give entrywise-real matrices") {
  const auto h = build_bloch(PotentialSpec::v1_nnn_matched(1.0, 0.7), 0.3, 8);
  for (int i = 0; i < h.dim(); ++i)
    for (int j = 0; j < h.dim(); ++j) CHECK(h.entries(i, j).imag() == 0.0);
}

TEST_CASE("k is folded into the first BZ") {
  const auto p = PotentialSpec::v1(1.0, 0.8);
  const auto a = build_bloch(p, 0.2, 4);
  const auto b = build_bloch(p, 1.2, 4);  // folds to 0.2
  CHECK(b.k == doctest::Approx(0.2).epsilon(1e-14));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      CHECK(std::abs(a.entries(i, j) - b.entries(i, j)) < 1e-14);
}

TEST_CASE("JSON round trip") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int rep = 0; rep < 20; ++rep) {
    PotentialSpec::CoeffMap c;
    for (int m = -3; m <= 3; ++m)
      if (rng() % 2) c[m] = cxd(u(rng), u(rng));
    if (c.empty()) c[1] = 1.0;
    const PotentialSpec p(std::move(c), PotentialSpec::kDefaultPeriod, "random");
    const PotentialSpec q = PotentialSpec::from_json(p.to_json());
    CHECK(q.label() == p.label());
    CHECK(q.period() == p.period());
    REQUIRE(q.coefficients().size() == p.coefficients().size());
    for (const auto& [m, cm] : p.coefficients()) CHECK(q.coefficient(m) == cm);
  }
}
