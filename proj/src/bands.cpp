#include "nhbloch/bands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <string>

#include "nhbloch/eig.hpp"

namespace nhbloch {

namespace {

struct KPointResult {
  cvec energies;
  std::vector<cvec> vectors;
  // left eigenvectors (right eigenvectors of H^H, matched by conjugate
  // eigenvalue proximity); right-eigenvector overlaps of a non-normal matrix
  // are not discriminating, so connectivity matches <L_prev | R_cur> where
  // any gauge skew cancels
  std::vector<cvec> left;
};

KPointResult solve_k_point(const PotentialSpec& potential, double k, int M, int n_bands,
                           bool want_vectors, bool want_left) {
  const BlochHamiltonian h = build_bloch(potential, k, M);
  KPointResult r;
  try {
    if (want_vectors) {
      EigenDecomposition d = eig(h.entries);
      r.energies.assign(d.eigenvalues.begin(), d.eigenvalues.begin() + n_bands);
      r.vectors.assign(d.right_eigenvectors.begin(), d.right_eigenvectors.begin() + n_bands);
      if (want_left) {
        EigenDecomposition dl = eig(h.entries.adjoint());
        r.left.resize(n_bands);
        std::vector<bool> used(dl.eigenvalues.size(), false);
        for (int b = 0; b < n_bands; ++b) {
          const cxd target = std::conj(d.eigenvalues[b]);
          int best = -1;
          double best_d = 0;
          for (size_t j = 0; j < dl.eigenvalues.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(dl.eigenvalues[j] - target);
            if (best < 0 || dist < best_d) {
              best_d = dist;
              best = static_cast<int>(j);
            }
          }
          used[best] = true;
          r.left[b] = std::move(dl.right_eigenvectors[best]);
        }
      }
    } else {
      cvec vals = eig_values_only(h.entries);
      r.energies.assign(vals.begin(), vals.begin() + n_bands);
    }
  } catch (const EigError& e) {
    throw std::runtime_error("band_sweep: eigensolver failed at k=" + std::to_string(k) +
                             ": " + e.what());
  }
  return r;
}

}  // namespace

BandStructure band_sweep(const PotentialSpec& potential, const std::vector<double>& k_grid,
                         int M, int n_bands, bool want_vectors, int threads) {
  if (k_grid.empty()) throw std::invalid_argument("band_sweep: empty k grid");
  if (n_bands < 1 || n_bands > 2 * M - 2)
    throw std::invalid_argument("band_sweep: need 1 <= n_bands <= 2M-2 to stay away from "
                                "the truncation edge");
  const int nk = static_cast<int>(k_grid.size());
  std::vector<KPointResult> results(nk);
  // connectivity needs vectors even if the caller does not
  const bool vectors_needed = want_vectors || nk > 1;
  const bool left_needed = nk > 1;
  if (threads > 1 && nk > 1) {
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      futs.push_back(std::async(std::launch::async, [&]() {
        for (int i = next.fetch_add(1); i < nk; i = next.fetch_add(1))
          results[i] = solve_k_point(potential, k_grid[i], M, n_bands, vectors_needed,
                                     left_needed);
      }));
    for (auto& f : futs) f.get();
  } else {
    for (int i = 0; i < nk; ++i)
      results[i] = solve_k_point(potential, k_grid[i], M, n_bands, vectors_needed,
                                 left_needed);
  }

  // band connectivity: greedy maximal biorthogonal overlap with the previous k
  for (int i = 1; i < nk && vectors_needed; ++i) {
    const auto& prev = results[i - 1].left;
    auto& cur = results[i];
    const int nb = n_bands;
    std::vector<int> assign(nb, -1);
    std::vector<bool> used(nb, false);
    for (int b = 0; b < nb; ++b) {
      int best = -1;
      double best_ov = -1;
      for (int c = 0; c < nb; ++c) {
        if (used[c]) continue;
        const double ov = std::abs(dot(prev[b], cur.vectors[c]));
        if (ov > best_ov) {
          best_ov = ov;
          best = c;
        }
      }
      assign[b] = best;
      used[best] = true;
    }
    KPointResult reordered;
    reordered.energies.resize(nb);
    reordered.vectors.resize(nb);
    reordered.left.resize(nb);
    for (int b = 0; b < nb; ++b) {
      reordered.energies[b] = cur.energies[assign[b]];
      reordered.vectors[b] = std::move(cur.vectors[assign[b]]);
      reordered.left[b] = std::move(cur.left[assign[b]]);
    }
    cur = std::move(reordered);
  }

  BandStructure bs;
  bs.k_grid = k_grid;
  bs.band_count = n_bands;
  bs.energies.resize(nk);
  if (want_vectors) bs.eigenvectors.resize(nk);
  for (int i = 0; i < nk; ++i) {
    bs.energies[i] = std::move(results[i].energies);
    if (want_vectors) bs.eigenvectors[i] = std::move(results[i].vectors);
  }
  return bs;
}

namespace {

// Tridiagonal system with two wrap-around corner entries, solved by a Thomas
// factorization plus a rank-2 Woodbury correction. The shift sits below the
// spectrum so the tridiagonal part is diagonally dominant.
class TridiagCornerSolver {
 public:
  TridiagCornerSolver(const cvec& diag, cxd off, cxd corner_top_right, cxd corner_bottom_left)
      : n_(static_cast<int>(diag.size())), off_(off), ctr_(corner_top_right),
        cbl_(corner_bottom_left), du_(n_), dl_(n_), d_(n_) {
    // LU of the tridiagonal part (no pivoting; dominant diagonal)
    d_[0] = diag[0];
    for (int i = 1; i < n_; ++i) {
      dl_[i] = off_ / d_[i - 1];
      d_[i] = diag[i] - dl_[i] * off_;
    }
    p_ = unit_solve(0);
    q_ = unit_solve(n_ - 1);
    // capacitance matrix (I + W^T T^{-1} U) for corners U = [e_0, e_{n-1}]
    s00_ = 1.0 + ctr_ * p_[n_ - 1];
    s01_ = ctr_ * q_[n_ - 1];
    s10_ = cbl_ * p_[0];
    s11_ = 1.0 + cbl_ * q_[0];
  }

  cvec solve(const cvec& b) const {
    cvec x = tri_solve(b);
    const cxd r0 = ctr_ * x[n_ - 1];
    const cxd r1 = cbl_ * x[0];
    const cxd det = s00_ * s11_ - s01_ * s10_;
    const cxd a0 = (s11_ * r0 - s01_ * r1) / det;
    const cxd a1 = (s00_ * r1 - s10_ * r0) / det;
    for (int i = 0; i < n_; ++i) x[i] -= a0 * p_[i] + a1 * q_[i];
    return x;
  }

 private:
  cvec tri_solve(const cvec& b) const {
    cvec y(n_);
    y[0] = b[0];
    for (int i = 1; i < n_; ++i) y[i] = b[i] - dl_[i] * y[i - 1];
    cvec x(n_);
    x[n_ - 1] = y[n_ - 1] / d_[n_ - 1];
    for (int i = n_ - 2; i >= 0; --i) x[i] = (y[i] - off_ * x[i + 1]) / d_[i];
    return x;
  }

  cvec unit_solve(int idx) const {
    cvec e(n_);
    e[idx] = 1.0;
    return tri_solve(e);
  }

  int n_;
  cxd off_, ctr_, cbl_;
  cvec du_, dl_, d_, p_, q_;
  cxd s00_, s01_, s10_, s11_;
};

}  // namespace

cvec fd_band_oracle(const PotentialSpec& potential, double k, int N, int n_bands) {
  if (N < 64) throw std::invalid_argument("fd_band_oracle: N must be >= 64");
  if (n_bands < 1 || n_bands > N / 4)
    throw std::invalid_argument("fd_band_oracle: invalid band count");
  const double a = potential.period();
  const double h = a / N;
  const double inv_h2 = 1.0 / (h * h);
  cvec vpot(N);
  double vmin_re = 0;
  for (int j = 0; j < N; ++j) {
    vpot[j] = potential.evaluate(j * h);
    vmin_re = std::min(vmin_re, vpot[j].real());
  }
  const cxd phase = std::exp(cxd(0.0, k * a));

  const double sigma = vmin_re - 1.0;  // shift below the spectrum
  cvec diag(N);
  for (int j = 0; j < N; ++j) diag[j] = 2.0 * inv_h2 + vpot[j] - sigma;
  const cxd off = cxd(-inv_h2);
  const cxd ctr = -std::conj(phase) * inv_h2;  // A(0, N-1)
  const cxd cbl = -phase * inv_h2;             // A(N-1, 0)
  TridiagCornerSolver solver(diag, off, ctr, cbl);

  auto apply_a = [&](const cvec& x) {
    cvec y(N);
    for (int j = 0; j < N; ++j) {
      cxd s = (2.0 * inv_h2 + vpot[j]) * x[j];
      s -= inv_h2 * x[(j + 1) % N] * (j + 1 == N ? phase : cxd(1.0));
      s -= inv_h2 * x[(j + N - 1) % N] * (j == 0 ? std::conj(phase) : cxd(1.0));
      y[j] = s;
    }
    return y;
  };

  // shift-invert subspace iteration with Rayleigh-Ritz on A
  const int p = std::min(N, n_bands + 6);
  std::mt19937 rng(12345u);
  std::normal_distribution<double> gauss;
  std::vector<cvec> q(p, cvec(N));
  for (auto& col : q)
    for (cxd& z : col) z = cxd(gauss(rng), gauss(rng));

  auto orthonormalize = [&](std::vector<cvec>& cols) {
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
      for (int rep = 0; rep < 2; ++rep)
        for (int j = 0; j < i; ++j) {
          const cxd proj = dot(cols[j], cols[i]);
          for (int r = 0; r < N; ++r) cols[i][r] -= proj * cols[j][r];
        }
      normalize(cols[i]);
    }
  };
  orthonormalize(q);

  cvec prev;
  for (int iter = 0; iter < 400; ++iter) {
    for (auto& col : q) col = solver.solve(col);
    orthonormalize(q);
    // Ritz values from the projected operator
    Matrix b(p, p);
    for (int j = 0; j < p; ++j) {
      const cvec aq = apply_a(q[j]);
      for (int i = 0; i < p; ++i) b(i, j) = dot(q[i], aq);
    }
    cvec ritz = eig_values_only(b);
    ritz.resize(n_bands);
    if (!prev.empty()) {
      double change = 0;
      for (int i = 0; i < n_bands; ++i)
        change = std::max(change, std::abs(ritz[i] - prev[i]) /
                                      std::max(1.0, std::abs(ritz[i])));
      if (change < 1e-12 && iter > 4) return ritz;
    }
    prev = ritz;
  }
  return prev;
}

double participation_ratio(const cvec& coeffs) {
  double s2 = 0, s4 = 0;
  for (const cxd& z : coeffs) {
    const double n = std::norm(z);
    s2 += n;
    s4 += n * n;
  }
  if (s2 == 0) throw std::invalid_argument("participation_ratio: zero vector");
  return s2 * s2 / s4;
}

cvec reconstruct_wavefunction(const cvec& coeffs, double k,
                              const std::vector<double>& x_grid) {
  const int len = static_cast<int>(coeffs.size());
  if (len % 2 == 0) throw std::invalid_argument("reconstruct_wavefunction: even-length "
                                                "coefficient vector has no center index");
  const int M = (len - 1) / 2;
  cvec psi(x_grid.size());
  for (size_t ix = 0; ix < x_grid.size(); ++ix) {
    const double x = x_grid[ix];
    cxd s{};
    for (int i = 0; i < len; ++i) s += coeffs[i] * std::exp(cxd(0.0, (i - M) * x));
    psi[ix] = s * std::exp(cxd(0.0, k * x));
  }
  return psi;
}

TailFit tail_profile(const cvec& coeffs) {
  TailFit fit;
  const int len = static_cast<int>(coeffs.size());
  if (len < 9) throw std::invalid_argument("tail_profile: need at least 9 coefficients");
  const int M = (len - 1) / 2;
  int peak = 0;
  for (int i = 1; i < len; ++i)
    if (std::abs(coeffs[i]) > std::abs(coeffs[peak])) peak = i;
  std::vector<double> ms, ys;
  for (int i = peak; i < len; ++i) {
    const double mag = std::abs(coeffs[i]);
    if (mag <= 1e-13) break;
    ms.push_back(i - M);
    ys.push_back(std::log(mag));
  }
  fit.points_used = static_cast<int>(ms.size());
  if (fit.points_used < 5) {
    fit.verdict = TailFit::Verdict::Inconclusive;
    return fit;
  }
  // normal equations for y ~ c0 + c1 m + c2 m^2
  double s[5] = {0, 0, 0, 0, 0}, b[3] = {0, 0, 0};
  for (size_t i = 0; i < ms.size(); ++i) {
    double mp = 1.0;
    for (int pwr = 0; pwr <= 4; ++pwr) {
      s[pwr] += mp;
      if (pwr <= 2) b[pwr] += ys[i] * mp;
      mp *= ms[i];
    }
  }
  const double a11 = s[0], a12 = s[1], a13 = s[2], a22 = s[2], a23 = s[3], a33 = s[4];
  const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                     a13 * (a12 * a23 - a22 * a13);
  const double c0 = (b[0] * (a22 * a33 - a23 * a23) - a12 * (b[1] * a33 - a23 * b[2]) +
                     a13 * (b[1] * a23 - a22 * b[2])) / det;
  const double c1 = (a11 * (b[1] * a33 - b[2] * a23) - b[0] * (a12 * a33 - a23 * a13) +
                     a13 * (a12 * b[2] - b[1] * a13)) / det;
  const double c2 = (a11 * (a22 * b[2] - a23 * b[1]) - a12 * (a12 * b[2] - b[1] * a13) +
                     b[0] * (a12 * a23 - a22 * a13)) / det;
  fit.constant_coeff = c0;
  fit.linear_coeff = c1;
  fit.quadratic_coeff = c2;
  double ss = 0;
  for (size_t i = 0; i < ms.size(); ++i) {
    const double pred = c0 + c1 * ms[i] + c2 * ms[i] * ms[i];
    ss += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.rms_residual = std::sqrt(ss / ms.size());
  fit.verdict = (c2 < 0 && std::abs(c2) > std::abs(c1) / M)
                    ? TailFit::Verdict::SuperExponential
                    : TailFit::Verdict::NotSuperExponential;
  return fit;
}

int converged_truncation(const PotentialSpec& potential, double k, int n_bands, int m_start) {
  int M = std::max(m_start, std::max(potential.bandwidth(), (n_bands + 2) / 2 + 1));
  cvec prev;
  for (; M <= 1024; M *= 2) {
    const BlochHamiltonian h = build_bloch(potential, k, M);
    cvec vals = eig_values_only(h.entries);
    vals.resize(n_bands);
    if (!prev.empty()) {
      double change = 0;
      for (int i = 0; i < n_bands; ++i) change = std::max(change, std::abs(vals[i] - prev[i]));
      if (change < 1e-10) return M / 2;
    }
    prev = vals;
  }
  return 1024;
}

}  // namespace nhbloch
