#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank2/eval.hpp"
#include "corank2/forms.hpp"
#include "corank2/linalg.hpp"
#include "corank2/sampling.hpp"

namespace corank2 {

class DistributionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReebPair {
  VectorField z1;
  VectorField z2;
};

using Framing = std::array<VectorField, 4>;
using QuotientVector = Vec<double, 2>;

/// Pointwise numeric data of a distribution at a scalar type T.
template <class T>
struct FrameData {
  Matrix<T, 2, 6> lambda;                 // rows: λ1, λ2 coefficients
  Matrix<T, 6, 4> framing;                // columns: X1..X4
  Matrix<T, 6, 2> reeb;                   // columns: Z1, Z2 (zero when absent)
  std::array<Matrix<T, 6, 6>, 2> dlambda; // antisymmetric coefficient matrices of dλ1, dλ2

  /// dλ_k(X_i, X_j) on the framing.
  Matrix<T, 4, 4> curvature(int k) const { return transpose(framing) * dlambda[k] * framing; }

  /// Columns X1..X4, Z1, Z2.
  Matrix<T, 6, 6> adapted_frame() const {
    Matrix<T, 6, 6> f;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 4; ++j) f(i, j) = framing(i, j);
      f(i, 4) = reeb(i, 0);
      f(i, 5) = reeb(i, 1);
    }
    return f;
  }

  Vec<T, 2> project(const Vec<T, 6>& w) const { return lambda * w; }
};

/// Pairs (a, b), a < b, enumerating the 15 coefficients of a 2-form.
inline const std::array<std::array<int, 2>, 15>& two_form_pairs() {
  static const std::array<std::array<int, 2>, 15> pairs = [] {
    std::array<std::array<int, 2>, 15> p{};
    int n = 0;
    for (int a = 0; a < kDim; ++a)
      for (int b = a + 1; b < kDim; ++b) p[n++] = {a, b};
    return p;
  }();
  return pairs;
}

inline MultiIndex pair_index(int a, int b) { return static_cast<MultiIndex>((1u << a) | (1u << b)); }

/// Wedge of two 2-forms on a 4-dimensional space, evaluated on the basis e1..e4.
template <class T>
T wedge4(const Matrix<T, 4, 4>& a, const Matrix<T, 4, 4>& b) {
  return a(0, 1) * b(2, 3) - a(0, 2) * b(1, 3) + a(0, 3) * b(1, 2) + a(2, 3) * b(0, 1) - a(1, 3) * b(0, 2) +
         a(1, 2) * b(0, 3);
}

struct BuildOptions {
  std::uint64_t seed = kDefaultSeed;
  int samples = 16;
  double tol = 1e-9;
};

/// Corank-2 distribution D = ker λ1 ∩ ker λ2 with a verified framing.
class Distribution {
 public:
  const Form& lambda(int i) const { return lambda_[i]; }
  const Form& dlambda(int i) const { return dlambda_[i]; }
  const Framing& framing() const { return framing_; }
  const std::optional<ReebPair>& reeb() const { return reeb_; }
  bool has_reeb() const { return reeb_.has_value(); }
  const Box& domain() const { return domain_; }

  /// Entries m11, m12, m22 of the quadratic form relative to the framing's dual volume.
  const std::array<Expr, 3>& qd_entries() const { return qd_; }

  /// λ_k([X_i, X_j]) as expressions, indexed [k][pair] over i < j.
  const std::array<std::array<Expr, 6>, 2>& bracket_projections() const { return bracket_proj_; }

  Distribution with_reeb(const ReebPair& r) const {
    Distribution d = *this;
    d.reeb_ = r;
    d.compile();
    return d;
  }

  template <class T>
  FrameData<T> frame_at(const Coords<T>& p) const {
    std::vector<Complex<T>> v = tape_->evaluate<T>(p);
    FrameData<T> f;
    std::size_t n = 0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < kDim; ++k) f.lambda(i, k) = v[n++].re;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < kDim; ++k) f.framing(k, j) = v[n++].re;
    if (reeb_)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < kDim; ++k) f.reeb(k, j) = v[n++].re;
    for (int i = 0; i < 2; ++i)
      for (const auto& [a, b] : two_form_pairs()) {
        T c = v[n++].re;
        f.dlambda[i](a, b) = c;
        f.dlambda[i](b, a) = -c;
      }
    return f;
  }

  /// Framing evaluated alone (cheaper than frame_at).
  template <class T>
  Matrix<T, 6, 4> framing_at(const Coords<T>& p) const {
    std::vector<Complex<T>> v = framing_tape_->evaluate<T>(p);
    Matrix<T, 6, 4> m;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < kDim; ++k) m(k, j) = v[j * kDim + k].re;
    return m;
  }

  template <class T>
  Matrix<T, 6, 2> reeb_at(const Coords<T>& p) const {
    if (!reeb_) throw DistributionError("no Reeb pair attached");
    std::vector<Complex<T>> v = reeb_tape_->evaluate<T>(p);
    Matrix<T, 6, 2> m;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < kDim; ++k) m(k, j) = v[j * kDim + k].re;
    return m;
  }

  Matrix<double, 2, 2> qd_at(const Point& p) const {
    std::vector<Complex<double>> v = qd_tape_->evaluate<double>(p);
    Matrix<double, 2, 2> m;
    m(0, 0) = v[0].re;
    m(0, 1) = m(1, 0) = v[1].re;
    m(1, 1) = v[2].re;
    return m;
  }

  friend Distribution build_distribution(const Form&, const Form&, const std::optional<Framing>&, const Box&,
                                         const BuildOptions&);

 private:
  Distribution() = default;

  void compile() {
    std::vector<Expr> roots;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < kDim; ++k) roots.push_back(lambda_[i].component(k));
    std::vector<Expr> fr;
    for (const auto& x : framing_)
      for (int k = 0; k < kDim; ++k) fr.push_back(x[k]);
    roots.insert(roots.end(), fr.begin(), fr.end());
    std::vector<Expr> rb;
    if (reeb_)
      for (const VectorField* z : {&reeb_->z1, &reeb_->z2})
        for (int k = 0; k < kDim; ++k) rb.push_back((*z)[k]);
    roots.insert(roots.end(), rb.begin(), rb.end());
    for (int i = 0; i < 2; ++i)
      for (const auto& [a, b] : two_form_pairs()) roots.push_back(dlambda_[i].coefficient(pair_index(a, b)));
    tape_ = std::make_shared<const ExprTape>(roots);
    framing_tape_ = std::make_shared<const ExprTape>(fr);
    if (reeb_) reeb_tape_ = std::make_shared<const ExprTape>(rb);
    qd_tape_ = std::make_shared<const ExprTape>(std::vector<Expr>{qd_[0], qd_[1], qd_[2]});
  }

  std::array<Form, 2> lambda_{Form(1), Form(1)};
  std::array<Form, 2> dlambda_{Form(2), Form(2)};
  Framing framing_;
  std::optional<ReebPair> reeb_;
  Box domain_;
  std::array<Expr, 3> qd_;
  std::array<std::array<Expr, 6>, 2> bracket_proj_;
  std::shared_ptr<const ExprTape> tape_, framing_tape_, reeb_tape_, qd_tape_;
};

namespace detail {

/// Framing from column pivoting on the 2×6 coefficient matrix at the domain center.
inline Framing auto_framing(const Form& l1, const Form& l2, const Box& domain) {
  Point c = domain.center();
  std::array<std::array<Expr, kDim>, 2> coef;
  Matrix<double, 2, 6> num;
  for (int k = 0; k < kDim; ++k) {
    coef[0][k] = l1.component(k);
    coef[1][k] = l2.component(k);
    num(0, k) = eval_real(coef[0][k], c);
    num(1, k) = eval_real(coef[1][k], c);
  }
  // First pivot: column of largest norm; second: largest residual after projecting it out.
  int p1 = 0;
  double best = -1.0;
  for (int k = 0; k < kDim; ++k) {
    double n = std::hypot(num(0, k), num(1, k));
    if (n > best + 1e-14) { best = n; p1 = k; }
  }
  if (best <= 1e-12) throw DistributionError("forms vanish at the domain center");
  int p2 = -1;
  best = -1.0;
  for (int k = 0; k < kDim; ++k) {
    if (k == p1) continue;
    double n2 = num(0, p1) * num(0, p1) + num(1, p1) * num(1, p1);
    double proj = (num(0, k) * num(0, p1) + num(1, k) * num(1, p1)) / n2;
    double r = std::hypot(num(0, k) - proj * num(0, p1), num(1, k) - proj * num(1, p1));
    if (r > best + 1e-14) { best = r; p2 = k; }
  }
  if (best <= 1e-12) throw DistributionError("corank < 2: forms dependent at the domain center");
  if (p2 < p1) std::swap(p1, p2);
  // Solve [c_p1 c_p2]·w = −c_f symbolically by Cramer's rule.
  const Expr &a = coef[0][p1], &b = coef[0][p2], &cc = coef[1][p1], &d = coef[1][p2];
  Expr det = a * d - b * cc;
  Framing fr;
  int j = 0;
  for (int f = 0; f < kDim; ++f) {
    if (f == p1 || f == p2) continue;
    VectorField x = VectorField::coordinate(coordinate_from_index(f));
    const Expr &r0 = coef[0][f], &r1 = coef[1][f];
    x[p1] = -(d * r0 - b * r1) / det;
    x[p2] = -(a * r1 - cc * r0) / det;
    fr[j++] = x;
  }
  return fr;
}

}  // namespace detail

/// Builds and verifies a distribution from its defining pair.
inline Distribution build_distribution(const Form& lambda1, const Form& lambda2,
                                       const std::optional<Framing>& framing_hint, const Box& domain,
                                       const BuildOptions& opt = {}) {
  if (lambda1.degree() != 1 || lambda2.degree() != 1) throw DegreeError("defining forms must have degree 1");
  Distribution d;
  d.lambda_ = {lambda1, lambda2};
  d.dlambda_ = {exterior_derivative(lambda1), exterior_derivative(lambda2)};
  d.domain_ = domain;

  // Real coefficients and corank exactly 2.
  {
    std::vector<Expr> roots;
    for (const Form* l : {&lambda1, &lambda2})
      for (int k = 0; k < kDim; ++k) roots.push_back(l->component(k));
    Form w = wedge(lambda1, lambda2);
    for (const auto& [a, b] : two_form_pairs()) roots.push_back(w.coefficient(pair_index(a, b)));
    SampledOptions so{opt.seed, 200, EvalMode::Real};
    for_each_regular_sample(ExprTape(roots), domain, opt.samples, so, [&](const Point& p, const auto& v) {
      double wmax = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(value_of(v[i].im)) > opt.tol) throw DistributionError("defining forms must be real");
        if (i >= 12) wmax = std::max(wmax, std::abs(v[i].re));
      }
      if (wmax <= 1e-10) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "corank < 2: lambda1 ^ lambda2 vanishes at (%g, %g, %g, %g, %g, %g)", p[0],
                      p[1], p[2], p[3], p[4], p[5]);
        throw DistributionError(buf);
      }
    });
  }

  d.framing_ = framing_hint ? *framing_hint : detail::auto_framing(lambda1, lambda2, domain);

  // Annihilation and independence of the framing.
  {
    std::vector<Expr> roots;
    for (int i = 0; i < 2; ++i)
      for (const auto& x : d.framing_) roots.push_back(evaluate_on(d.lambda_[i], {x}));
    for (const auto& x : d.framing_)
      for (int k = 0; k < kDim; ++k) roots.push_back(x[k]);
    SampledOptions so{opt.seed, 200, EvalMode::Real};
    for_each_regular_sample(ExprTape(roots), domain, opt.samples, so, [&](const Point&, const auto& v) {
      for (int i = 0; i < 8; ++i)
        if (std::abs(value_of(v[i])) > opt.tol) throw DistributionError("framing field not annihilated by the defining forms");
      Matrix<double, 6, 4> phi;
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < kDim; ++k) phi(k, j) = v[8 + j * kDim + k].re;
      double gram = determinant(transpose(phi) * phi);
      if (!(gram > 1e-10)) throw DistributionError("framing fields linearly dependent (Gram determinant " + std::to_string(gram) + ")");
    });
  }

  // q_D entries against the framing's dual volume, and λ_k of framing brackets.
  d.qd_[0] = evaluate_on(wedge(d.dlambda_[0], d.dlambda_[0]), std::span<const VectorField>(d.framing_));
  d.qd_[1] = evaluate_on(wedge(d.dlambda_[0], d.dlambda_[1]), std::span<const VectorField>(d.framing_));
  d.qd_[2] = evaluate_on(wedge(d.dlambda_[1], d.dlambda_[1]), std::span<const VectorField>(d.framing_));
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j, ++n) {
      VectorField br = lie_bracket(d.framing_[i], d.framing_[j]);
      for (int k = 0; k < 2; ++k) d.bracket_proj_[k][n] = evaluate_on(d.lambda_[k], {br});
    }
  d.compile();
  return d;
}

/// (λ1(X), λ2(X)) at p: the class of X in Q in the Reeb basis.
inline QuotientVector quotient_project(const Distribution& d, const VectorField& x, const Point& p) {
  if (!d.has_reeb()) throw DistributionError("no Reeb pair attached");
  ExprTape tape({evaluate_on(d.lambda(0), {x}), evaluate_on(d.lambda(1), {x})});
  auto v = tape.evaluate<double>(p);
  QuotientVector q;
  q[0] = v[0].re;
  q[1] = v[1].re;
  return q;
}

struct LeviData {
  std::array<Matrix<double, 4, 4>, 2> levi;  // [k](i, j) = λ_k([X_i, X_j])
  double cross_check = 0.0;                  // max |−dλ_k(X_i,X_j) − λ_k([X_i,X_j])|
};

/// Levi map on the framing: −dλ_k(X_i, X_j), cross-checked against bracket projection.
inline LeviData levi_matrix(const Distribution& d, const Point& p) {
  FrameData<double> f = d.frame_at(p);
  LeviData out;
  for (int k = 0; k < 2; ++k) out.levi[k] = -f.curvature(k);
  std::vector<Expr> roots;
  for (int k = 0; k < 2; ++k)
    for (const Expr& e : d.bracket_projections()[k]) roots.push_back(e);
  auto v = ExprTape(roots).evaluate<double>(p);
  int n = 0;
  for (int k = 0; k < 2; ++k) {
    int m = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j, ++m)
        out.cross_check = std::max(out.cross_check, std::abs(out.levi[k](i, j) - v[n + m].re));
    n += 6;
  }
  return out;
}

/// da restricted to the framing, for a in the span of λ1, λ2.
inline Matrix<Expr, 4, 4> dual_curvature(const Distribution& d, const Form& a, int samples = 16,
                                         std::uint64_t seed = kDefaultSeed) {
  if (a.degree() != 1) throw DegreeError("dual curvature needs a 1-form");
  std::vector<Expr> ann;
  for (const auto& x : d.framing()) ann.push_back(evaluate_on(a, {x}));
  SampledOptions so{seed, 200, EvalMode::Real};
  for_each_regular_sample(ExprTape(ann), d.domain(), samples, so, [&](const Point&, const auto& v) {
    for (const auto& z : v)
      if (magnitude(z) > 1e-9) throw DistributionError("form is not in the annihilator span of the distribution");
  });
  Form da = exterior_derivative(a);
  Matrix<Expr, 4, 4> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m(i, j) = i == j ? Expr(0.0) : evaluate_on(da, {d.framing()[i], d.framing()[j]});
  return m;
}

struct CheckResult {
  std::string name;
  bool passed = true;
  double residual = 0.0;
};

struct ReebReport {
  std::array<CheckResult, 4> conditions;
  int samples = 0;
  std::optional<Distribution> attached;  // the distribution with the pair, on full pass

  bool passed() const {
    for (const auto& c : conditions)
      if (!c.passed) return false;
    return true;
  }
};

struct ReebOptions {
  int samples = 50;
  double tol = 1e-10;
  std::uint64_t seed = kDefaultSeed;
  std::vector<Point> extra_points;  // checked in addition to the quasi-random samples
};

/// Checks the four Reeb conditions for (Z1, Z2) at sampled points of the domain.
inline ReebReport verify_reeb(const Distribution& d, const VectorField& z1, const VectorField& z2,
                              const ReebOptions& opt = {}) {
  ReebReport rep;
  rep.conditions[0].name = "transversal: TM = D + <Z1,Z2>";
  rep.conditions[1].name = "normalized: lambda_i(Z_j) = delta_ij";
  rep.conditions[2].name = "curvature-free: i_{Z_i} dlambda_j |_D = 0";
  rep.conditions[3].name = "commuting: [Z1,Z2] = 0";
  rep.conditions[0].residual = INFINITY;

  std::vector<Expr> roots;
  const std::array<const VectorField*, 2> z = {&z1, &z2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) roots.push_back(evaluate_on(d.lambda(i), {*z[j]}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (const auto& x : d.framing()) roots.push_back(evaluate_on(d.dlambda(j), {*z[i], x}));
  VectorField br = lie_bracket(z1, z2);
  for (int k = 0; k < kDim; ++k) roots.push_back(br[k]);
  for (const auto* zz : z)
    for (int k = 0; k < kDim; ++k) roots.push_back((*zz)[k]);
  for (const auto& x : d.framing())
    for (int k = 0; k < kDim; ++k) roots.push_back(x[k]);
  ExprTape tape(roots);

  auto visit = [&](const Point&, const std::vector<Complex<double>>& v) {
    std::size_t n = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        rep.conditions[1].residual = std::max(rep.conditions[1].residual, std::abs(v[n++].re - (i == j ? 1.0 : 0.0)));
    for (int m = 0; m < 16; ++m) rep.conditions[2].residual = std::max(rep.conditions[2].residual, std::abs(v[n++].re));
    for (int k = 0; k < kDim; ++k) rep.conditions[3].residual = std::max(rep.conditions[3].residual, std::abs(v[n++].re));
    Matrix<double, 6, 6> f;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < kDim; ++k) f(k, 4 + j) = v[n++].re;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < kDim; ++k) f(k, j) = v[n++].re;
    rep.conditions[0].residual = std::min(rep.conditions[0].residual, std::abs(determinant(f)));
    ++rep.samples;
  };
  for_each_regular_sample(tape, d.domain(), opt.samples, SampledOptions{opt.seed, 200, EvalMode::Real}, visit);
  for (const Point& p : opt.extra_points) visit(p, tape.evaluate<double>(p));

  rep.conditions[0].passed = rep.conditions[0].residual > 1e-10;
  for (int c = 1; c < 4; ++c) rep.conditions[c].passed = rep.conditions[c].residual < opt.tol;
  if (rep.passed()) rep.attached = d.with_reeb({z1, z2});
  return rep;
}

}  // namespace corank2
