#pragma once

#include <cmath>
#include <type_traits>

namespace corank2 {

/// Forward-mode dual number v + d·ε with ε² = 0.
/// Nesting (Dual<Dual<double>>) carries a second, independent direction.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x), d(0.0) {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  template <class U>
    requires(std::is_same_v<U, T> && !std::is_same_v<T, double>)
  explicit constexpr Dual(const U& value) : v(value), d(0.0) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
  Dual& operator*=(double s) { v *= s; d *= s; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.v); }

inline bool is_exact_zero(double x) { return x == 0.0; }
template <class T> bool is_exact_zero(const Dual<T>& x) {
  return is_exact_zero(x.v) && is_exact_zero(x.d);
}

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double s) { return {a.v + s, a.d}; }
template <class T> Dual<T> operator+(double s, const Dual<T>& a) { return {a.v + s, a.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double s) { return {a.v - s, a.d}; }
template <class T> Dual<T> operator-(double s, const Dual<T>& a) { return {s - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double s) { return {a.v * s, a.d * s}; }
template <class T> Dual<T> operator*(double s, const Dual<T>& a) { return {a.v * s, a.d * s}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double s) { return {a.v / s, a.d / s}; }
template <class T> Dual<T> operator/(double s, const Dual<T>& a) {
  T q = s / a.v;
  return {q, -q * a.d / a.v};
}

template <class T> Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T s = sqrt(x.v);
  return {s, x.d / (2.0 * s)};
}
template <class T> Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.v);
  return {e, e * x.d};
}
template <class T> Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}
template <class T> Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T> Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {cos(x.v), -(sin(x.v) * x.d)};
}
template <class T> Dual<T> tan(const Dual<T>& x) {
  using std::tan;
  T t = tan(x.v);
  return {t, (1.0 + t * t) * x.d};
}
template <class T> Dual<T> atan(const Dual<T>& x) {
  using std::atan;
  return {atan(x.v), x.d / (1.0 + x.v * x.v)};
}
template <class T> Dual<T> sinh(const Dual<T>& x) {
  using std::cosh;
  using std::sinh;
  return {sinh(x.v), cosh(x.v) * x.d};
}
template <class T> Dual<T> cosh(const Dual<T>& x) {
  using std::cosh;
  using std::sinh;
  return {cosh(x.v), sinh(x.v) * x.d};
}
template <class T> Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  T r2 = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}
template <class T> Dual<T> abs(const Dual<T>& x) { return value_of(x) < 0.0 ? -x : x; }

/// x^n by repeated squaring; valid for any ring-like scalar.
template <class T> T ipow(const T& x, int n) {
  if (n < 0) return T(1.0) / ipow(x, -n);
  T result(1.0);
  T base = x;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

/// Seeds `x` as an independent variable with derivative `dx`.
template <class T> Dual<T> make_dual(const T& x, const T& dx) { return Dual<T>(x, dx); }

}  // namespace corank2
