#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

#include "corank2/dual.hpp"

namespace corank2 {

/// Complex number over an arbitrary real scalar (double or a Dual).
template <class T>
struct Complex {
  T re{};
  T im{};

  constexpr Complex() = default;
  constexpr Complex(const T& r) : re(r), im(0.0) {}
  constexpr Complex(const T& r, const T& i) : re(r), im(i) {}
  template <class U>
    requires(std::is_same_v<U, double> && !std::is_same_v<T, double>)
  constexpr Complex(U r) : re(r), im(0.0) {}
  Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  Complex& operator+=(const Complex& o) { re = re + o.re; im = im + o.im; return *this; }
  Complex& operator-=(const Complex& o) { re = re - o.re; im = im - o.im; return *this; }
  Complex& operator*=(const Complex& o) { *this = *this * o; return *this; }
};

template <class T> Complex<T> operator-(const Complex<T>& a) { return {-a.re, -a.im}; }
template <class T> Complex<T> operator+(const Complex<T>& a, const Complex<T>& b) { return {a.re + b.re, a.im + b.im}; }
template <class T> Complex<T> operator-(const Complex<T>& a, const Complex<T>& b) { return {a.re - b.re, a.im - b.im}; }
template <class T> Complex<T> operator*(const Complex<T>& a, const Complex<T>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T> Complex<T> operator/(const Complex<T>& a, const Complex<T>& b) {
  T den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
template <class T> Complex<T> operator*(const Complex<T>& a, const T& s) { return {a.re * s, a.im * s}; }
template <class T> Complex<T> operator*(const T& s, const Complex<T>& a) { return {a.re * s, a.im * s}; }
template <class T> Complex<T> operator/(const Complex<T>& a, const T& s) { return {a.re / s, a.im / s}; }
template <class T> Complex<T> operator+(const Complex<T>& a, const T& s) { return {a.re + s, a.im}; }
template <class T> Complex<T> operator-(const Complex<T>& a, const T& s) { return {a.re - s, a.im}; }

template <class T>
  requires(!std::is_same_v<T, double>)
Complex<T> operator*(const Complex<T>& a, double s) { return {a.re * s, a.im * s}; }
template <class T>
  requires(!std::is_same_v<T, double>)
Complex<T> operator*(double s, const Complex<T>& a) { return {a.re * s, a.im * s}; }

template <class T> Complex<T> conj(const Complex<T>& a) { return {a.re, -a.im}; }
template <class T> T abs2(const Complex<T>& a) { return a.re * a.re + a.im * a.im; }

inline double magnitude(double x) { return std::abs(x); }
template <class T> double magnitude(const Dual<T>& x) { return std::abs(value_of(x)); }
template <class T> double magnitude(const Complex<T>& z) { return std::hypot(value_of(z.re), value_of(z.im)); }

template <class T> bool is_exact_zero(const Complex<T>& z) { return is_exact_zero(z.re) && is_exact_zero(z.im); }

template <class T> std::complex<double> value_of(const Complex<T>& z) { return {value_of(z.re), value_of(z.im)}; }

template <class T> Complex<T> to_complex(const T& x) { return Complex<T>(x); }
inline double real_part(double x) { return x; }
template <class T> T real_part(const Dual<T>& x) { return x; }
template <class T> T real_part(const Complex<T>& z) { return z.re; }

/// Complex functions on the principal branch.
namespace cmath {

template <class T> Complex<T> sqrt(const Complex<T>& z) {
  using std::sqrt;
  T r = sqrt(z.re * z.re + z.im * z.im);
  if (value_of(z.re) >= 0.0) {
    T a = sqrt((r + z.re) * 0.5);
    if (is_exact_zero(a)) return {a, a};
    return {a, z.im / (2.0 * a)};
  }
  T b = sqrt((r - z.re) * 0.5);
  if (value_of(z.im) < 0.0) b = -b;
  return {z.im / (2.0 * b), b};
}

template <class T> Complex<T> exp(const Complex<T>& z) {
  using std::cos;
  using std::exp;
  using std::sin;
  T e = exp(z.re);
  return {e * cos(z.im), e * sin(z.im)};
}

template <class T> Complex<T> log(const Complex<T>& z) {
  using std::atan2;
  using std::log;
  return {0.5 * log(z.re * z.re + z.im * z.im), atan2(z.im, z.re)};
}

template <class T> Complex<T> sin(const Complex<T>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}

template <class T> Complex<T> cos(const Complex<T>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {cos(z.re) * cosh(z.im), -(sin(z.re) * sinh(z.im))};
}

template <class T> Complex<T> tan(const Complex<T>& z) { return sin(z) / cos(z); }

// atan z = (i/2)·[log(1 − iz) − log(1 + iz)]
template <class T> Complex<T> atan(const Complex<T>& z) {
  Complex<T> iz{-z.im, z.re};
  Complex<T> one{T(1.0), T(0.0)};
  Complex<T> diff = log(one - iz) - log(one + iz);
  return {diff.im * -0.5, diff.re * 0.5};
}

}  // namespace cmath
}  // namespace corank2
