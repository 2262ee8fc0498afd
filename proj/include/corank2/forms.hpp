#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank2/eval.hpp"
#include "corank2/expr.hpp"
#include "corank2/parse.hpp"

namespace corank2 {

class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly increasing multi-index over the coordinates, stored as a bitmask.
using MultiIndex = std::uint8_t;

inline int degree_of(MultiIndex m) { return std::popcount(static_cast<unsigned>(m)); }

/// Vector field with six coefficients over (∂x1, ∂x2, ∂y1, ∂y2, ∂z1, ∂z2).
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::array<Expr, kDim> c) : c_(std::move(c)) {}

  static VectorField coordinate(Coordinate c) {
    VectorField v;
    v.c_[index_of(c)] = Expr(1.0);
    return v;
  }
  static VectorField parse(std::string_view text) { return VectorField(parse_vector_field_coefficients(text)); }

  const Expr& operator[](int k) const { return c_[k]; }
  Expr& operator[](int k) { return c_[k]; }
  const std::array<Expr, kDim>& coefficients() const { return c_; }

  /// Directional derivative X(f).
  Expr apply(const Expr& f) const {
    Expr r;
    for (int k = 0; k < kDim; ++k)
      if (!c_[k].is_zero()) r += c_[k] * differentiate(f, coordinate_from_index(k));
    return r;
  }

 private:
  std::array<Expr, kDim> c_{};
};

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField r;
  for (int k = 0; k < kDim; ++k) r[k] = a[k] + b[k];
  return r;
}
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r;
  for (int k = 0; k < kDim; ++k) r[k] = a[k] - b[k];
  return r;
}
inline VectorField operator*(const Expr& s, const VectorField& a) {
  VectorField r;
  for (int k = 0; k < kDim; ++k) r[k] = s * a[k];
  return r;
}

/// Differential form with ScalarExpr (possibly complex) coefficients.
class Form {
 public:
  explicit Form(int degree = 0) : degree_(degree) {
    if (degree < 0 || degree > kDim) throw DegreeError("form degree out of range: " + std::to_string(degree));
  }

  static Form function(const Expr& f) {
    Form r(0);
    r.set(0, f);
    return r;
  }
  static Form differential(Coordinate c) {
    Form r(1);
    r.set(static_cast<MultiIndex>(1u << index_of(c)), Expr(1.0));
    return r;
  }
  static Form one_form(const std::array<Expr, kDim>& coeff) {
    Form r(1);
    for (int k = 0; k < kDim; ++k) r.set(static_cast<MultiIndex>(1u << k), coeff[k]);
    return r;
  }
  static Form parse_one_form(std::string_view text) { return one_form(parse_one_form_coefficients(text)); }

  int degree() const { return degree_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Expr coefficient(MultiIndex m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Expr(0.0) : it->second;
  }
  /// Coefficient of a 1-form on dx_k.
  Expr component(int k) const { return coefficient(static_cast<MultiIndex>(1u << k)); }

  void set(MultiIndex m, const Expr& c) {
    if (degree_of(m) != degree_) throw DegreeError("multi-index degree does not match form degree");
    if (c.is_zero()) terms_.erase(m);
    else terms_[m] = c;
  }
  void add(MultiIndex m, const Expr& c) { set(m, coefficient(m) + c); }

 private:
  int degree_;
  std::map<MultiIndex, Expr> terms_;
};

inline Form operator+(const Form& a, const Form& b) {
  if (a.degree() != b.degree()) throw DegreeError("sum of forms of different degree");
  Form r = a;
  for (const auto& [m, c] : b.terms()) r.add(m, c);
  return r;
}
inline Form operator*(const Expr& s, const Form& a) {
  Form r(a.degree());
  if (s.is_zero()) return r;
  for (const auto& [m, c] : a.terms()) r.set(m, s * c);
  return r;
}
inline Form operator-(const Form& a) { return Expr(-1.0) * a; }
inline Form operator-(const Form& a, const Form& b) { return a + (-b); }

namespace detail {
/// Sign of the permutation sorting the concatenation (A, B) of disjoint multi-indices.
inline int shuffle_sign(MultiIndex a, MultiIndex b) {
  int inversions = 0;
  for (int i = 0; i < kDim; ++i)
    if (a & (1u << i)) inversions += std::popcount(static_cast<unsigned>(b) & ((1u << i) - 1u));
  return (inversions & 1) ? -1 : 1;
}
}  // namespace detail

inline Form wedge(const Form& a, const Form& b) {
  if (a.degree() + b.degree() > kDim) throw DegreeError("wedge degree exceeds 6");
  Form r(a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      Expr c = ca * cb;
      r.add(static_cast<MultiIndex>(ma | mb), detail::shuffle_sign(ma, mb) < 0 ? -c : c);
    }
  return r;
}

inline Form exterior_derivative(const Form& a) {
  if (a.degree() >= kDim) return Form(kDim);
  Form r(a.degree() + 1);
  for (const auto& [m, c] : a.terms())
    for (int k = 0; k < kDim; ++k) {
      if (m & (1u << k)) continue;
      Expr dc = differentiate(c, coordinate_from_index(k));
      if (dc.is_zero()) continue;
      int before = std::popcount(static_cast<unsigned>(m) & ((1u << k) - 1u));
      r.add(static_cast<MultiIndex>(m | (1u << k)), (before & 1) ? -dc : dc);
    }
  return r;
}

inline Form interior_product(const VectorField& x, const Form& a) {
  if (a.degree() < 1) throw DegreeError("interior product of a 0-form");
  Form r(a.degree() - 1);
  for (const auto& [m, c] : a.terms()) {
    int pos = 0;
    for (int k = 0; k < kDim; ++k) {
      if (!(m & (1u << k))) continue;
      if (!x[k].is_zero()) {
        Expr t = x[k] * c;
        r.add(static_cast<MultiIndex>(m & ~(1u << k)), (pos & 1) ? -t : t);
      }
      ++pos;
    }
  }
  return r;
}

/// ω(V1, ..., Vk) as a scalar expression.
inline Expr evaluate_on(const Form& a, std::span<const VectorField> fields) {
  if (static_cast<int>(fields.size()) != a.degree()) throw DegreeError("number of fields differs from form degree");
  Form cur = a;
  for (const VectorField& v : fields) cur = interior_product(v, cur);
  return cur.coefficient(0);
}
inline Expr evaluate_on(const Form& a, std::initializer_list<VectorField> fields) {
  std::vector<VectorField> v(fields);
  return evaluate_on(a, std::span<const VectorField>(v));
}

inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  VectorField r;
  for (int k = 0; k < kDim; ++k) r[k] = x.apply(y[k]) - y.apply(x[k]);
  return r;
}

/// Diffeomorphism given by forward images of the coordinates and the inverse images.
struct CoordinateMap {
  std::array<Expr, kDim> forward;
  std::array<Expr, kDim> inverse;

  static CoordinateMap identity() {
    CoordinateMap m;
    for (int k = 0; k < kDim; ++k) m.forward[k] = m.inverse[k] = Expr::var(k);
    return m;
  }
  CoordinateMap inverted() const { return {inverse, forward}; }

  /// Largest |φ(φ⁻¹(y)) − y| and |φ⁻¹(φ(x)) − x| over the samples.
  double composition_residual(const Box& source, const Box& target, int n, const SampledOptions& opt = {}) const {
    double worst = 0.0;
    auto check = [&](const std::array<Expr, kDim>& first, const std::array<Expr, kDim>& second, const Box& box) {
      std::vector<Expr> roots;
      for (int k = 0; k < kDim; ++k) roots.push_back(substitute(second[k], first));
      for_each_regular_sample(ExprTape(roots), box, n, opt, [&](const Point& p, const std::vector<Complex<double>>& v) {
        for (int k = 0; k < kDim; ++k) worst = std::max(worst, std::abs(value_of(v[k]) - std::complex<double>(p[k])));
      });
    };
    check(forward, inverse, source);
    check(inverse, forward, target);
    return worst;
  }
};

class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws CompositionError unless φ∘φ⁻¹ and φ⁻¹∘φ are the identity to tol at sampled points.
inline void verify_invertible(const CoordinateMap& phi, const Box& source, const Box& target, int n = 50,
                              double tol = 1e-9) {
  double r = phi.composition_residual(source, target, n);
  if (!(r <= tol)) throw CompositionError("coordinate map composition residual " + std::to_string(r));
}

/// φ*a: coefficients composed with φ, differentials replaced by dφ.
inline Form pullback(const CoordinateMap& phi, const Form& a) {
  std::array<Form, kDim> dphi;
  for (int k = 0; k < kDim; ++k) dphi[k] = exterior_derivative(Form::function(phi.forward[k]));
  Form r(a.degree());
  for (const auto& [m, c] : a.terms()) {
    Form term = Form::function(substitute(c, phi.forward));
    for (int k = 0; k < kDim; ++k)
      if (m & (1u << k)) term = wedge(term, dphi[k]);
    r = r + term;
  }
  return r;
}

/// φ_*X expressed in the target coordinates.
inline VectorField pushforward_field(const CoordinateMap& phi, const VectorField& x) {
  VectorField r;
  for (int i = 0; i < kDim; ++i) {
    const Expr& img = phi.forward[i];
    Expr s;
    for (int k = 0; k < kDim; ++k)
      if (!x[k].is_zero()) s += differentiate(img, coordinate_from_index(k)) * x[k];
    r[i] = substitute(s, phi.inverse);
  }
  return r;
}

}  // namespace corank2
