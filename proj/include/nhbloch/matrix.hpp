#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

namespace nhbloch {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;

// Dense row-major complex matrix. Sizes in this project stay small
// (plane-wave truncations up to ~129), so no banded storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cxd& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const cxd& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  Matrix adjoint() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
  }

  Matrix operator*(const Matrix& b) const {
    assert(cols_ == b.rows_);
    Matrix c(rows_, b.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const cxd aik = (*this)(i, k);
        if (aik == cxd{}) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  cvec apply(const cvec& x) const {
    assert(static_cast<int>(x.size()) == cols_);
    cvec y(rows_);
    for (int i = 0; i < rows_; ++i) {
      cxd s{};
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const cxd& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  cxd trace() const {
    cxd t{};
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  cvec a_;
};

inline cxd dot(const cvec& a, const cvec& b) {  // conjugate-linear in first argument
  cxd s{};
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline cxd dotu(const cvec& a, const cvec& b) {  // no conjugation
  cxd s{};
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const cvec& a) {
  double s = 0;
  for (const cxd& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline void normalize(cvec& a) {
  double n = norm2(a);
  if (n > 0)
    for (cxd& z : a) z /= n;
}

}  // namespace nhbloch
