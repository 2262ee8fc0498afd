#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "corank2/cap_eastwood.hpp"
#include "corank2/distribution.hpp"
#include "corank2/ellipticity.hpp"

namespace corank2 {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Central difference scheme: step and order (2 or 4).
struct Stencil {
  double h = 1e-5;
  int order = 2;
  double radius() const { return order == 4 ? 2.0 * h : h; }
};

struct OracleOptions {
  Stencil bracket{1e-5, 2};  // Levi map and q_D at the evaluation point
  Stencil chain{1e-3, 4};    // derivatives of computed fields (J̃, J) inside the J/S chain
  double guard = 1e-4;       // extra margin the stencils must keep from the domain boundary
};

/// Coefficients of λ1, λ2, the framing and the Reeb pair, evaluated numerically.
class NumericModel {
 public:
  explicit NumericModel(const Distribution& d) : domain_(d.domain()) {
    if (!d.has_reeb()) throw OracleError("the oracle needs a Reeb pair");
    std::vector<Expr> roots;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < kDim; ++k) roots.push_back(d.lambda(i).component(k));
    for (const auto& x : d.framing())
      for (int k = 0; k < kDim; ++k) roots.push_back(x[k]);
    for (const VectorField* z : {&d.reeb()->z1, &d.reeb()->z2})
      for (int k = 0; k < kDim; ++k) roots.push_back((*z)[k]);
    tape_ = std::make_shared<const ExprTape>(roots);
  }

  struct Values {
    Matrix<double, 2, 6> lambda;
    Matrix<double, 6, 4> framing;
    Matrix<double, 6, 2> reeb;
  };

  Values at(const Point& p) const {
    auto v = tape_->evaluate<double>(p);
    Values out;
    std::size_t n = 0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < kDim; ++k) out.lambda(i, k) = v[n++].re;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < kDim; ++k) out.framing(k, j) = v[n++].re;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < kDim; ++k) out.reeb(k, j) = v[n++].re;
    return out;
  }

  const Box& domain() const { return domain_; }

 private:
  Box domain_;
  std::shared_ptr<const ExprTape> tape_;
};

namespace oracle_detail {

inline Point shifted(const Point& p, const Vec<double, 6>& dir, double s) {
  Point q = p;
  for (int k = 0; k < kDim; ++k) q[k] += s * dir[k];
  return q;
}

/// Directional derivative of a matrix-valued function by central differences.
template <class M>
M derivative(const std::function<M(const Point&)>& f, const Point& p, const Vec<double, 6>& dir, const Stencil& s) {
  if (s.order == 4) {
    M a = f(shifted(p, dir, 2 * s.h)), b = f(shifted(p, dir, s.h)), c = f(shifted(p, dir, -s.h)),
      d = f(shifted(p, dir, -2 * s.h));
    return (1.0 / (12.0 * s.h)) * (8.0 * (b - c) - (a - d));
  }
  return (1.0 / (2.0 * s.h)) * (f(shifted(p, dir, s.h)) - f(shifted(p, dir, -s.h)));
}

/// q_D entry from the Levi map by full antisymmetrization of the 4-form (a∧b)(e1..e4).
inline double four_form(const Matrix<double, 4, 4>& a, const Matrix<double, 4, 4>& b) {
  std::array<int, 4> s = {0, 1, 2, 3};
  double sum = 0.0;
  do {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (s[i] > s[j]) ++inv;
    sum += (inv % 2 ? -1.0 : 1.0) * a(s[0], s[1]) * b(s[2], s[3]);
  } while (std::next_permutation(s.begin(), s.end()));
  return sum / 4.0;
}

/// Orientation of a block complex structure from fixed basis triples, first well-conditioned one wins.
inline int block_orientation(const Matrix<double, 6, 6>& j) {
  static constexpr std::array<std::array<int, 3>, 4> triples = {{{0, 2, 4}, {0, 1, 4}, {1, 3, 4}, {0, 3, 4}}};
  for (const auto& t : triples) {
    Matrix<double, 6, 6> b{};
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 6; ++r) {
        b(r, 2 * q) = r == t[q] ? 1.0 : 0.0;
        b(r, 2 * q + 1) = j(r, t[q]);
      }
    double d = determinant(b);
    if (std::abs(d) > 1e-6) return d > 0 ? 1 : -1;
  }
  throw OracleError("orientation undetermined");
}

}  // namespace oracle_detail

/// Independent numeric route: finite-difference brackets on raw coefficient
/// values, closed-form J on D from the Levi map, exact K from one Levi block.
class NumericOracle {
 public:
  NumericOracle(const Distribution& d, OracleOptions opt = {}) : model_(d), opt_(opt) {}

  /// L_k(i, j) = λ_k([X_i, X_j]) with brackets from differentiated framing coefficients.
  std::array<Matrix<double, 4, 4>, 2> levi(const Point& p, const Stencil& s) const {
    guard(p, s.radius());
    auto v = model_.at(p);
    std::function<Matrix<double, 6, 4>(const Point&)> framing = [this](const Point& q) { return model_.at(q).framing; };
    std::array<Matrix<double, 6, 4>, 4> dx;  // dx[i] = ∂_{X_i} of the framing
    for (int i = 0; i < 4; ++i) dx[i] = oracle_detail::derivative(framing, p, v.framing.column(i), s);
    std::array<Matrix<double, 4, 4>, 2> l{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        Vec<double, 6> br = dx[i].column(j) - dx[j].column(i);
        Vec<double, 2> q = v.lambda * br;
        l[0](i, j) = q[0];
        l[1](i, j) = q[1];
      }
    return l;
  }

  Matrix<double, 2, 2> qd(const Point& p) const { return qd_from(levi(p, opt_.bracket)); }

  struct Chain {
    NumericModel::Values v;
    std::array<Matrix<double, 4, 4>, 2> levi;
    Matrix<double, 2, 2> qd;
    std::complex<double> t;
    bool conjugated = false;
    Matrix<double, 4, 4> jd;
    Matrix<double, 2, 2> jq;
    Matrix<double, 6, 6> frame;
    Matrix<double, 6, 6> jtilde;
  };

  /// Root, J on D, J on Q and J̃ at p.
  Chain tilde(const Point& p) const {
    Chain c;
    c.v = model_.at(p);
    c.levi = levi(p, opt_.chain);
    c.qd = qd_from(c.levi);
    double m11 = c.qd(0, 0), m12 = c.qd(0, 1), m22 = c.qd(1, 1);
    double det = m11 * m22 - m12 * m12;
    double scale = m11 * m11 + 2 * m12 * m12 + m22 * m22;
    if (!(det > kDegeneracyTol * scale)) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "non-elliptic: det=%.12g", det);
      throw OracleError(buf);
    }
    // m22 s² + 2 m12 s + m11 = 0
    std::complex<double> disc = std::sqrt(std::complex<double>(m12 * m12 - m11 * m22, 0.0));
    std::complex<double> r1 = (-m12 + disc) / m22, r2 = (-m12 - disc) / m22;
    c.t = r1.imag() > 0 ? r1 : r2;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < 4; ++j) c.frame(i, j) = c.v.framing(i, j);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < 2; ++j) c.frame(i, 4 + j) = c.v.reeb(i, j);
    structures(c);
    if (oracle_detail::block_orientation(block_diag(c.jd, c.jq)) < 0) {
      c.t = std::conj(c.t);
      c.conjugated = true;
      structures(c);
    }
    c.jtilde = c.frame * block_diag(c.jd, c.jq) * inverse(c.frame);
    return c;
  }

  /// Canonical J at p: J̃ plus the correction solved from the first Levi block.
  Matrix<double, 6, 6> j_full(const Point& p) const {
    Chain c = tilde(p);
    return j_full_from(p, c);
  }

  /// S(Z_i, X_j) with brackets of J-extended fields by nested finite differences.
  std::array<std::array<QuotientVector, 4>, 2> s_values(const Point& p) const {
    guard(p, 3 * opt_.chain.radius());
    auto v = model_.at(p);
    Matrix<double, 6, 6> j = j_full(p);
    std::function<Matrix<double, 6, 4>(const Point&)> framing = [this](const Point& q) { return model_.at(q).framing; };
    std::function<Matrix<double, 6, 2>(const Point&)> reeb = [this](const Point& q) { return model_.at(q).reeb; };
    std::function<Matrix<double, 6, 2>(const Point&)> jreeb = [this](const Point& q) {
      return Matrix<double, 6, 2>(j_full(q) * model_.at(q).reeb);
    };
    Matrix<double, 6, 2> jz = j * v.reeb;
    std::array<std::array<QuotientVector, 4>, 2> out{};
    for (int i = 0; i < 2; ++i) {
      Matrix<double, 6, 4> dx_z = oracle_detail::derivative(framing, p, v.reeb.column(i), opt_.chain);
      Matrix<double, 6, 4> dx_jz = oracle_detail::derivative(framing, p, jz.column(i), opt_.chain);
      for (int k = 0; k < 4; ++k) {
        Vec<double, 6> x = v.framing.column(k);
        Vec<double, 6> b1 = dx_z.column(k) - oracle_detail::derivative(reeb, p, x, opt_.chain).column(i);
        Vec<double, 6> b2 = dx_jz.column(k) - oracle_detail::derivative(jreeb, p, x, opt_.chain).column(i);
        out[i][k] = v.lambda * (b1 + j * b2);
      }
    }
    return out;
  }

 private:
  void guard(const Point& p, double radius) const {
    // Stencils move along framing and Reeb fields, whose length scales the reach.
    auto v = model_.at(p);
    double reach = 0.0;
    for (int j = 0; j < 4; ++j) reach = std::max(reach, frobenius(v.framing.column(j)));
    for (int j = 0; j < 2; ++j) reach = std::max(reach, frobenius(v.reeb.column(j)));
    if (!model_.domain().contains(p, radius * reach * 4.0 + opt_.guard))
      throw OracleError("finite-difference stencil leaves the domain");
  }

  static Matrix<double, 2, 2> qd_from(const std::array<Matrix<double, 4, 4>, 2>& l) {
    Matrix<double, 2, 2> m;
    m(0, 0) = oracle_detail::four_form(l[0], l[0]);
    m(0, 1) = m(1, 0) = oracle_detail::four_form(l[0], l[1]);
    m(1, 1) = oracle_detail::four_form(l[1], l[1]);
    return m;
  }

  /// J_Q e_c solves ψ(q) = i·ψ(e_c) for ψ = λ1 + t·λ2; J_D = J11 + J12·L1⁻¹L2.
  static void structures(Chain& c) {
    std::complex<double> p[2] = {1.0, c.t};
    for (int col = 0; col < 2; ++col) {
      std::complex<double> rhs = std::complex<double>(0.0, 1.0) * p[col];
      // Re/Im of p1 q1 + p2 q2 = rhs by Cramer's rule.
      double a = p[0].real(), b = p[1].real(), cc = p[0].imag(), d = p[1].imag();
      double det = a * d - b * cc;
      c.jq(0, col) = (rhs.real() * d - b * rhs.imag()) / det;
      c.jq(1, col) = (a * rhs.imag() - cc * rhs.real()) / det;
    }
    c.jd = c.jq(0, 0) * Matrix<double, 4, 4>::identity() + c.jq(0, 1) * (inverse(c.levi[0]) * c.levi[1]);
  }

  Matrix<double, 6, 6> j_full_from(const Point& p, const Chain& c) const {
    std::function<Matrix<double, 6, 2>(const Point&)> reeb = [this](const Point& q) { return model_.at(q).reeb; };
    std::function<Matrix<double, 6, 4>(const Point&)> framing = [this](const Point& q) { return model_.at(q).framing; };
    std::function<Matrix<double, 6, 2>(const Point&)> jtz = [this](const Point& q) {
      Chain cq = tilde(q);
      return Matrix<double, 6, 2>(cq.jtilde * cq.v.reeb);
    };
    Matrix<double, 6, 2> jz = c.jtilde * c.v.reeb;
    Matrix<double, 4, 2> kz;
    for (int i = 0; i < 2; ++i) {
      Matrix<double, 6, 4> dx_z = oracle_detail::derivative(framing, p, c.v.reeb.column(i), opt_.chain);
      Matrix<double, 6, 4> dx_jz = oracle_detail::derivative(framing, p, jz.column(i), opt_.chain);
      std::array<Vec<double, 2>, 4> st;  // S̃(Z_i, X_k)
      for (int k = 0; k < 4; ++k) {
        Vec<double, 6> x = c.v.framing.column(k);
        Vec<double, 6> b1 = dx_z.column(k) - oracle_detail::derivative(reeb, p, x, opt_.chain).column(i);
        Vec<double, 6> b2 = dx_jz.column(k) - oracle_detail::derivative(jtz, p, x, opt_.chain).column(i);
        st[k] = c.v.lambda * b1 + c.jq * (c.v.lambda * b2);
      }
      // L(K Z_i, X_j) = (J_Q S̃(Z_i, X_j) + S̃(Z_i, J X_j)) / 2; first component only.
      Vec<double, 4> g;
      for (int j = 0; j < 4; ++j) {
        Vec<double, 2> sj{};
        for (int k = 0; k < 4; ++k) sj = sj + c.jd(k, j) * st[k];
        g[j] = 0.5 * (c.jq * st[j] + sj)[0];
      }
      // Σ_m κ_m L1(m, j) = g_j, i.e. L1ᵀκ = g with L1ᵀ = −L1.
      Vec<double, 4> kappa = solve(Matrix<double, 4, 4>(-c.levi[0]), g);
      for (int m = 0; m < 4; ++m) kz(m, i) = kappa[m];
    }
    return c.jtilde + c.v.framing * (kz * c.v.lambda);
  }

  NumericModel model_;
  OracleOptions opt_;
};

struct OracleResult {
  Point point{};
  Kind kind = Kind::Degenerate;
  Matrix<double, 2, 2> qd;
  std::optional<Matrix<double, 6, 6>> j_full;
  std::optional<std::array<std::array<QuotientVector, 4>, 2>> s;
  double delta_levi = 0.0;
  double delta_qd = 0.0;
  double delta_j = 0.0;
  double delta_s = 0.0;
};

/// Runs the numeric route at p and compares it with the symbolic/AD engine.
/// Non-elliptic points report only the Levi and q_D comparison unless require_elliptic.
inline OracleResult numeric_oracle(const Distribution& d, const Point& p, bool require_elliptic = true,
                                   const OracleOptions& opt = {}) {
  NumericOracle o(d, opt);
  OracleResult r;
  r.point = p;
  auto l = o.levi(p, opt.bracket);
  LeviData sym = levi_matrix(d, p);
  for (int k = 0; k < 2; ++k) r.delta_levi = std::max(r.delta_levi, max_abs_diff(l[k], sym.levi[k]));
  r.qd = o.qd(p);
  r.delta_qd = max_abs_diff(r.qd, d.qd_at(p));
  Classification c = classify_matrix(r.qd);
  r.kind = c.kind;
  if (c.kind != Kind::Elliptic) {
    if (require_elliptic) throw NonEllipticError(c);
    return r;
  }
  r.j_full = o.j_full(p);
  r.delta_j = max_abs_diff(*r.j_full, canonical_J(d, p).j_full);
  r.s = o.s_values(p);
  STensorReport st = s_tensor(d, p);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 4; ++k)
      for (int c2 = 0; c2 < 2; ++c2) r.delta_s = std::max(r.delta_s, std::abs((*r.s)[i][k][c2] - st.values[i][k][c2]));
  return r;
}

}  // namespace corank2
