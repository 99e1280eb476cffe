#include "nhbloch/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nhbloch {

bool canonical_less(const cxd& a, const cxd& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// EISPACK-style balancing by radix-2 diagonal scaling (no permutation step;
// these matrices have no isolated eigenvalues worth splitting off).
void balance(Matrix& a, std::vector<double>& scale) {
  const int n = a.rows();
  scale.assign(n, 1.0);
  const double radix = 2.0, sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0, r = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= sq;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale[i] *= f;
        for (int j = 0; j < n; ++j) a(i, j) /= f;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg; accumulates the orthogonal
// factor into z when provided.
void hessenberg(Matrix& a, Matrix* z) {
  const int n = a.rows();
  cvec v(n);
  for (int col = 0; col < n - 2; ++col) {
    double sigma = 0;
    for (int i = col + 1; i < n; ++i) sigma += std::norm(a(i, col));
    sigma = std::sqrt(sigma);
    if (sigma == 0) continue;
    const cxd x0 = a(col + 1, col);
    const cxd phase = (x0 == cxd{}) ? cxd(1.0) : x0 / std::abs(x0);
    double vnorm2 = 0;
    for (int i = col + 1; i < n; ++i) {
      v[i] = a(i, col);
      vnorm2 += std::norm(v[i]);
    }
    v[col + 1] += phase * sigma;
    vnorm2 += sigma * sigma + 2.0 * sigma * std::abs(x0);
    if (vnorm2 == 0) continue;
    const double tau = 2.0 / vnorm2;
    // left: rows col+1..n-1
    for (int j = col; j < n; ++j) {
      cxd s{};
      for (int i = col + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= tau;
      for (int i = col + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // right: columns col+1..n-1
    for (int i = 0; i < n; ++i) {
      cxd s{};
      for (int j = col + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= tau;
      for (int j = col + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    if (z) {
      for (int i = 0; i < n; ++i) {
        cxd s{};
        for (int j = col + 1; j < n; ++j) s += (*z)(i, j) * v[j];
        s *= tau;
        for (int j = col + 1; j < n; ++j) (*z)(i, j) -= s * std::conj(v[j]);
      }
    }
  }
  for (int i = 2; i < n; ++i)
    for (int j = 0; j < i - 1; ++j) a(i, j) = cxd{};
}

struct Rotation {
  cxd c, s;
};

Rotation make_givens(const cxd& x, const cxd& y) {
  const double r = std::hypot(std::abs(x), std::abs(y));
  if (r == 0) return {cxd(1.0), cxd(0.0)};
  return {x / r, y / r};
}

cxd wilkinson_shift(const cxd& a, const cxd& b, const cxd& c, const cxd& d) {
  const cxd p = (a - d) / 2.0;
  const cxd disc = std::sqrt(p * p + b * c);
  const cxd den = (std::abs(p + disc) >= std::abs(p - disc)) ? p + disc : p - disc;
  if (den == cxd{}) return d;
  return d - b * c / den;
}

// One explicit single-shift QR sweep on the active block [lo, hi] of the
// Hessenberg matrix h, accumulated into z when provided: shift the block
// diagonal, factor QR by Givens rotations, form RQ, unshift.
void qr_sweep(Matrix& h, Matrix* z, int lo, int hi, const cxd& mu) {
  const int n = h.rows();
  for (int i = lo; i <= hi; ++i) h(i, i) -= mu;
  std::vector<Rotation> rots(hi - lo);
  // left phase: Q^H (H - mu) = R
  for (int p = lo; p < hi; ++p) {
    rots[p - lo] = make_givens(h(p, p), h(p + 1, p));
    const cxd c = rots[p - lo].c, s = rots[p - lo].s;
    for (int j = p; j < n; ++j) {
      const cxd t0 = h(p, j), t1 = h(p + 1, j);
      h(p, j) = std::conj(c) * t0 + std::conj(s) * t1;
      h(p + 1, j) = -s * t0 + c * t1;
    }
    h(p + 1, p) = cxd{};
  }
  // right phase: R Q, Hessenberg by construction
  for (int p = lo; p < hi; ++p) {
    const cxd c = rots[p - lo].c, s = rots[p - lo].s;
    for (int r = 0; r <= p + 1; ++r) {
      const cxd t0 = h(r, p), t1 = h(r, p + 1);
      h(r, p) = c * t0 + s * t1;
      h(r, p + 1) = -std::conj(s) * t0 + std::conj(c) * t1;
    }
    if (z) {
      for (int r = 0; r < n; ++r) {
        const cxd t0 = (*z)(r, p), t1 = (*z)(r, p + 1);
        (*z)(r, p) = c * t0 + s * t1;
        (*z)(r, p + 1) = -std::conj(s) * t0 + std::conj(c) * t1;
      }
    }
  }
  for (int i = lo; i <= hi; ++i) h(i, i) += mu;
}

// Reduce the Hessenberg matrix h to upper triangular (complex Schur) form.
void qr_triangularize(Matrix& h, Matrix* z) {
  const int n = h.rows();
  const double hnorm = std::max(h.frobenius_norm(), 1e-300);
  const int budget = 30 * n;
  int sweeps = 0;
  int hi = n - 1;
  int block_iters = 0;
  while (hi > 0) {
    // deflate negligible subdiagonals
    for (int i = 1; i <= hi; ++i) {
      const double tol = kEps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)));
      if (std::abs(h(i, i - 1)) <= std::max(tol, kEps * hnorm * 1e-2)) h(i, i - 1) = cxd{};
    }
    if (h(hi, hi - 1) == cxd{}) {
      --hi;
      block_iters = 0;
      continue;
    }
    int lo = hi;
    while (lo > 0 && h(lo, lo - 1) != cxd{}) --lo;
    if (sweeps >= budget)
      throw EigError("eig: QR iteration failed to converge after " + std::to_string(budget) +
                         " sweeps on deflation block [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]",
                     lo, hi);
    cxd mu;
    if (block_iters > 0 && block_iters % 10 == 0) {
      // exceptional shift to break symmetry-induced cycling
      const double off = std::abs(h(hi, hi - 1)) + (hi >= 2 ? std::abs(h(hi - 1, hi - 2)) : 0.0);
      mu = h(hi, hi) + 0.75 * off;
    } else {
      mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    qr_sweep(h, z, lo, hi, mu);
    ++sweeps;
    ++block_iters;
  }
}

// LU solve with partial pivoting; used only for inverse-iteration refinement.
bool lu_solve(Matrix a, cvec& b) {
  const int n = a.rows();
  std::vector<int> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(best, col))) best = i;
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      std::swap(b[col], b[best]);
    }
    cxd d = a(col, col);
    if (std::abs(d) < 1e-300) d = cxd(1e-300);
    for (int i = col + 1; i < n; ++i) {
      const cxd f = a(i, col) / d;
      if (f == cxd{}) continue;
      for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
    a(col, col) = d;
  }
  for (int i = n - 1; i >= 0; --i) {
    cxd s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return true;
}

double residual_norm(const Matrix& a, const cxd& lambda, const cvec& v) {
  cvec av = a.apply(v);
  for (size_t i = 0; i < av.size(); ++i) av[i] -= lambda * v[i];
  return norm2(av);
}

void fix_phase(cvec& v) {
  size_t imax = 0;
  double amax = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > amax) {
      amax = m;
      imax = i;
    }
  }
  if (amax == 0) return;
  const cxd rot = std::conj(v[imax]) / amax;
  for (cxd& z : v) z *= rot;
}

}  // namespace

cvec eig_values_only(const Matrix& a) {
  const int n = a.rows();
  if (n == 0) return {};
  if (n == 1) return {a(0, 0)};
  Matrix h = a;
  std::vector<double> scale;
  balance(h, scale);
  hessenberg(h, nullptr);
  qr_triangularize(h, nullptr);
  cvec vals(n);
  for (int i = 0; i < n; ++i) vals[i] = h(i, i);
  std::sort(vals.begin(), vals.end(), canonical_less);
  return vals;
}

EigenDecomposition eig(const Matrix& a) {
  const int n = a.rows();
  EigenDecomposition out;
  if (n == 0) return out;
  const double anorm = a.frobenius_norm();
  const double res_tol = 1e-10 * std::max(1.0, anorm);

  Matrix t = a;
  std::vector<double> scale;
  balance(t, scale);
  const Matrix balanced = t;
  Matrix z = Matrix::identity(n);
  if (n > 1) {
    hessenberg(t, &z);
    qr_triangularize(t, &z);
  }

  const double tnorm = std::max(t.frobenius_norm(), 1e-300);
  out.eigenvalues.resize(n);
  out.right_eigenvectors.resize(n);
  out.residuals.resize(n);

  cvec y(n), v(n);
  for (int e = 0; e < n; ++e) {
    const cxd lambda = t(e, e);
    // back-substitution on the triangular Schur factor
    std::fill(y.begin(), y.end(), cxd{});
    y[e] = 1.0;
    for (int j = e - 1; j >= 0; --j) {
      cxd s{};
      for (int k = j + 1; k <= e; ++k) s += t(j, k) * y[k];
      cxd d = t(j, j) - lambda;
      if (std::abs(d) < kEps * tnorm) d = cxd(kEps * tnorm);
      y[j] = -s / d;
      if (std::abs(y[j]) > 1e100) {
        const double inv = 1.0 / std::abs(y[j]);
        for (int k = j; k <= e; ++k) y[k] *= inv;
      }
    }
    for (int i = 0; i < n; ++i) {
      cxd s{};
      for (int j = 0; j <= e; ++j) s += z(i, j) * y[j];
      v[i] = s;
    }
    // undo balancing
    for (int i = 0; i < n; ++i) v[i] *= scale[i];
    normalize(v);
    double res = residual_norm(a, lambda, v);
    if (res > res_tol) {
      // inverse-iteration refinement on the balanced matrix
      cvec w(n);
      for (int i = 0; i < n; ++i) w[i] = v[i] / scale[i];
      normalize(w);
      Matrix shifted = balanced;
      const double pert = kEps * tnorm;
      for (int i = 0; i < n; ++i) shifted(i, i) -= lambda + cxd(pert);
      for (int it = 0; it < 3; ++it) {
        cvec next = w;
        lu_solve(shifted, next);
        normalize(next);
        cvec cand(n);
        for (int i = 0; i < n; ++i) cand[i] = next[i] * scale[i];
        normalize(cand);
        const double cres = residual_norm(a, lambda, cand);
        if (cres < res) {
          res = cres;
          v = cand;
          w = next;
        } else {
          break;
        }
      }
    }
    fix_phase(v);
    out.eigenvalues[e] = lambda;
    out.right_eigenvectors[e] = v;
    out.residuals[e] = res;
  }

  // canonical order
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return canonical_less(out.eigenvalues[i], out.eigenvalues[j]);
  });
  EigenDecomposition sorted;
  sorted.eigenvalues.resize(n);
  sorted.right_eigenvectors.resize(n);
  sorted.residuals.resize(n);
  for (int i = 0; i < n; ++i) {
    sorted.eigenvalues[i] = out.eigenvalues[order[i]];
    sorted.right_eigenvectors[i] = std::move(out.right_eigenvectors[order[i]]);
    sorted.residuals[i] = out.residuals[order[i]];
  }
  return sorted;
}

}  // namespace nhbloch
