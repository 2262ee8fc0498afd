#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank2/complex.hpp"

namespace corank2 {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Small dense row-major matrix with compile-time shape.
template <class T, std::size_t R, std::size_t C>
struct Matrix {
  std::array<T, R * C> data{};

  static constexpr std::size_t rows = R;
  static constexpr std::size_t cols = C;

  T& operator()(std::size_t i, std::size_t j) { return data[i * C + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * C + j]; }
  T& operator[](std::size_t i) requires(C == 1) { return data[i]; }
  const T& operator[](std::size_t i) const requires(C == 1) { return data[i]; }

  static Matrix zero() { return Matrix{}; }
  static Matrix identity() requires(R == C) {
    Matrix m{};
    for (std::size_t i = 0; i < R; ++i) m(i, i) = T(1.0);
    return m;
  }

  Matrix<T, R, 1> column(std::size_t j) const {
    Matrix<T, R, 1> v{};
    for (std::size_t i = 0; i < R; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Matrix<T, 1, C> row(std::size_t i) const {
    Matrix<T, 1, C> v{};
    for (std::size_t j = 0; j < C; ++j) v(0, j) = (*this)(i, j);
    return v;
  }
  void set_column(std::size_t j, const Matrix<T, R, 1>& v) {
    for (std::size_t i = 0; i < R; ++i) (*this)(i, j) = v[i];
  }
};

template <class T, std::size_t N> using Vec = Matrix<T, N, 1>;

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator+(const Matrix<T, R, C>& a, const Matrix<T, R, C>& b) {
  Matrix<T, R, C> r;
  for (std::size_t k = 0; k < R * C; ++k) r.data[k] = a.data[k] + b.data[k];
  return r;
}
template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator-(const Matrix<T, R, C>& a, const Matrix<T, R, C>& b) {
  Matrix<T, R, C> r;
  for (std::size_t k = 0; k < R * C; ++k) r.data[k] = a.data[k] - b.data[k];
  return r;
}
template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> operator-(const Matrix<T, R, C>& a) {
  Matrix<T, R, C> r;
  for (std::size_t k = 0; k < R * C; ++k) r.data[k] = -a.data[k];
  return r;
}
template <class T, std::size_t R, std::size_t K, std::size_t C>
Matrix<T, R, C> operator*(const Matrix<T, R, K>& a, const Matrix<T, K, C>& b) {
  Matrix<T, R, C> r{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const T& aik = a(i, k);
      for (std::size_t j = 0; j < C; ++j) r(i, j) = r(i, j) + aik * b(k, j);
    }
  return r;
}
template <class T, std::size_t R, std::size_t C, class S>
  requires(std::is_same_v<S, T> || std::is_same_v<S, double>)
Matrix<T, R, C> operator*(const S& s, const Matrix<T, R, C>& a) {
  Matrix<T, R, C> r;
  for (std::size_t k = 0; k < R * C; ++k) r.data[k] = a.data[k] * s;
  return r;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, C, R> transpose(const Matrix<T, R, C>& a) {
  Matrix<T, C, R> r;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) r(j, i) = a(i, j);
  return r;
}

template <class U, class T, std::size_t R, std::size_t C, class F>
Matrix<U, R, C> map(const Matrix<T, R, C>& a, F&& f) {
  Matrix<U, R, C> r;
  for (std::size_t k = 0; k < R * C; ++k) r.data[k] = f(a.data[k]);
  return r;
}

/// Value-level (double) copy, dropping derivative parts.
template <class T, std::size_t R, std::size_t C>
auto values(const Matrix<T, R, C>& a) {
  using V = decltype(value_of(std::declval<T>()));
  return map<V>(a, [](const T& x) { return value_of(x); });
}

/// Largest entrywise magnitude.
template <class T, std::size_t R, std::size_t C>
double max_abs(const Matrix<T, R, C>& a) {
  double m = 0.0;
  for (const auto& x : a.data) m = std::max(m, magnitude(x));
  return m;
}

template <class T, std::size_t R, std::size_t C>
double frobenius(const Matrix<T, R, C>& a) {
  double s = 0.0;
  for (const auto& x : a.data) s += magnitude(x) * magnitude(x);
  return std::sqrt(s);
}

template <class T, std::size_t R, std::size_t C>
double max_abs_diff(const Matrix<T, R, C>& a, const Matrix<T, R, C>& b) {
  return max_abs(a - b);
}

/// Solves A·X = B by Gauss-Jordan elimination with partial pivoting.
template <class T, std::size_t N, std::size_t M>
Matrix<T, N, M> solve(Matrix<T, N, N> a, Matrix<T, N, M> b) {
  double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    double best = magnitude(a(col, col));
    for (std::size_t r = col + 1; r < N; ++r) {
      double m = magnitude(a(r, col));
      if (m > best) { best = m; piv = r; }
    }
    if (best <= 1e-14 * scale) throw NumericalError("singular matrix in solve");
    if (piv != col) {
      for (std::size_t j = 0; j < N; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < M; ++j) std::swap(b(col, j), b(piv, j));
    }
    T inv = T(1.0) / a(col, col);
    for (std::size_t j = 0; j < N; ++j) a(col, j) = a(col, j) * inv;
    for (std::size_t j = 0; j < M; ++j) b(col, j) = b(col, j) * inv;
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      T f = a(r, col);
      if (is_exact_zero(f)) continue;
      for (std::size_t j = 0; j < N; ++j) a(r, j) = a(r, j) - f * a(col, j);
      for (std::size_t j = 0; j < M; ++j) b(r, j) = b(r, j) - f * b(col, j);
    }
  }
  return b;
}

template <class T, std::size_t N>
Matrix<T, N, N> inverse(const Matrix<T, N, N>& a) {
  return solve(a, Matrix<T, N, N>::identity());
}

template <class T, std::size_t N>
T determinant(Matrix<T, N, N> a) {
  T det(1.0);
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    double best = magnitude(a(col, col));
    for (std::size_t r = col + 1; r < N; ++r) {
      double m = magnitude(a(r, col));
      if (m > best) { best = m; piv = r; }
    }
    if (best == 0.0) return T(0.0);
    if (piv != col) {
      for (std::size_t j = 0; j < N; ++j) std::swap(a(col, j), a(piv, j));
      det = -det;
    }
    det = det * a(col, col);
    T inv = T(1.0) / a(col, col);
    for (std::size_t r = col + 1; r < N; ++r) {
      T f = a(r, col) * inv;
      for (std::size_t j = col; j < N; ++j) a(r, j) = a(r, j) - f * a(col, j);
    }
  }
  return det;
}

template <class T, std::size_t N>
T trace(const Matrix<T, N, N>& a) {
  T s(0.0);
  for (std::size_t i = 0; i < N; ++i) s = s + a(i, i);
  return s;
}

template <class T, std::size_t N>
T dot(const Vec<T, N>& a, const Vec<T, N>& b) {
  T s(0.0);
  for (std::size_t i = 0; i < N; ++i) s = s + a[i] * b[i];
  return s;
}

template <class T> T conj_if_complex(const T& x) { return x; }
template <class T> Complex<T> conj_if_complex(const Complex<T>& x) { return conj(x); }

/// Result of a least-squares solve.
template <class T, std::size_t C>
struct LeastSquares {
  Vec<T, C> x;
  double residual = 0.0;  // ‖A·x − b‖₂ at value level
};

/// Minimizes ‖A·x − b‖₂ by modified Gram-Schmidt QR (real scalars).
template <class T, std::size_t R, std::size_t C>
LeastSquares<T, C> least_squares(const Matrix<T, R, C>& a, const Vec<T, R>& b) {
  static_assert(R >= C);
  std::array<Vec<T, R>, C> q;
  Matrix<T, C, C> rmat{};
  for (std::size_t j = 0; j < C; ++j) q[j] = a.column(j);
  double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t j = 0; j < C; ++j) {
    using std::sqrt;
    T nrm = sqrt(dot(q[j], q[j]));
    if (magnitude(nrm) <= 1e-12 * scale) throw NumericalError("rank-deficient least-squares system");
    rmat(j, j) = nrm;
    for (std::size_t i = 0; i < R; ++i) q[j][i] = q[j][i] / nrm;
    for (std::size_t k = j + 1; k < C; ++k) {
      T r = dot(q[j], q[k]);
      rmat(j, k) = r;
      for (std::size_t i = 0; i < R; ++i) q[k][i] = q[k][i] - r * q[j][i];
    }
  }
  Vec<T, C> qtb;
  for (std::size_t j = 0; j < C; ++j) qtb[j] = dot(q[j], b);
  Vec<T, C> x;
  for (std::size_t jj = C; jj-- > 0;) {
    T s = qtb[jj];
    for (std::size_t k = jj + 1; k < C; ++k) s = s - rmat(jj, k) * x[k];
    x[jj] = s / rmat(jj, jj);
  }
  Vec<T, R> res = a * x - b;
  double r2 = 0.0;
  for (std::size_t i = 0; i < R; ++i) r2 += magnitude(res[i]) * magnitude(res[i]);
  return {x, std::sqrt(r2)};
}

/// Basis of the right null space of a full-row-rank R×C matrix (C − R vectors),
/// from reduced row echelon form with complete pivoting on columns.
template <class T, std::size_t R, std::size_t C>
std::array<Vec<T, C>, C - R> null_space(Matrix<T, R, C> a, double rank_tol = 1e-9) {
  static_assert(R < C);
  std::array<std::size_t, R> pivot_col{};
  std::array<bool, C> is_pivot{};
  double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t r = 0; r < R; ++r) {
    std::size_t best_i = r, best_j = 0;
    double best = -1.0;
    for (std::size_t i = r; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        if (is_pivot[j]) continue;
        double m = magnitude(a(i, j));
        if (m > best) { best = m; best_i = i; best_j = j; }
      }
    if (best <= rank_tol * scale) throw NumericalError("null space dimension exceeds expected");
    for (std::size_t j = 0; j < C; ++j) std::swap(a(r, j), a(best_i, j));
    pivot_col[r] = best_j;
    is_pivot[best_j] = true;
    T inv = T(1.0) / a(r, best_j);
    for (std::size_t j = 0; j < C; ++j) a(r, j) = a(r, j) * inv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == r) continue;
      T f = a(i, best_j);
      for (std::size_t j = 0; j < C; ++j) a(i, j) = a(i, j) - f * a(r, j);
    }
  }
  std::array<Vec<T, C>, C - R> basis{};
  std::size_t k = 0;
  for (std::size_t j = 0; j < C; ++j) {
    if (is_pivot[j]) continue;
    Vec<T, C> v{};
    v[j] = T(1.0);
    for (std::size_t r = 0; r < R; ++r) v[pivot_col[r]] = -a(r, j);
    basis[k++] = v;
  }
  return basis;
}

/// Block-diagonal assembly.
template <class T, std::size_t A, std::size_t B>
Matrix<T, A + B, A + B> block_diag(const Matrix<T, A, A>& x, const Matrix<T, B, B>& y) {
  Matrix<T, A + B, A + B> r{};
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j) r(i, j) = x(i, j);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = 0; j < B; ++j) r(A + i, A + j) = y(i, j);
  return r;
}

}  // namespace corank2
