#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank2/distribution.hpp"
#include "corank2/dual.hpp"
#include "corank2/ellipticity.hpp"
#include "corank2/linalg.hpp"

namespace corank2 {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RootChoice { Auto, Upper, Lower };

/// Eigenvalue of J on ker(dψ|_D) = ker α ∩ ker β. MinusI is the convention under
/// which the Levi map is complex bilinear for the J_Q induced by ψ.
enum class KernelConvention { MinusI, PlusI };

struct PipelineOptions {
  RootChoice root = RootChoice::Auto;
  KernelConvention kernel = KernelConvention::MinusI;
  std::complex<double> psi_scale{1.0, 0.0};
  double tol = kDegeneracyTol;
  double k_residual_tol = 1e-8;
  bool enforce_k_residual = true;
  bool negate_jq = false;  // mutation hook: flips J_Q after construction
};

struct RootData {
  std::complex<double> t;
  double discriminant = 0.0;  // m11·m22 − m12²
};

/// Upper-half-plane root of m22·s² + 2·m12·s + m11 = 0.
template <class T>
Complex<T> upper_root(const T& m11, const T& m12, const T& m22) {
  using std::sqrt;
  T disc = m11 * m22 - m12 * m12;
  T sq = sqrt(disc);
  T im = value_of(m22) > 0.0 ? sq / m22 : -(sq / m22);
  return {-(m12 / m22), im};
}

inline RootData find_root(const QdMatrix& m, const Point& p, double tol = kDegeneracyTol) {
  Matrix<double, 2, 2> mm = m.at(p);
  Classification c = classify_matrix(mm, tol);
  if (c.kind != Kind::Elliptic) throw NonEllipticError(c);
  Complex<double> t = upper_root(mm(0, 0), mm(0, 1), mm(1, 1));
  return {{t.re, t.im}, c.det};
}

/// Complex 1-forms on D in the framing coframe with α∧β = dψ|_D.
template <class T>
struct FactorizationT {
  Matrix<Complex<T>, 1, 4> alpha;
  Matrix<Complex<T>, 1, 4> beta;
  double plucker_residual = 0.0;  // |dψ∧dψ| on X1..X4
  double wedge_residual = 0.0;    // max |α∧β − dψ|_D|
};
using Factorization = FactorizationT<double>;

inline constexpr double kPluckerTol = 1e-8;

/// Contraction-based factorization of a simple complex 2-form on a 4-space.
template <class T>
FactorizationT<T> factor_two_form(const Matrix<Complex<T>, 4, 4>& w) {
  FactorizationT<T> f;
  Complex<T> pf = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
  f.plucker_residual = 2.0 * magnitude(pf);
  if (!(f.plucker_residual <= kPluckerTol))
    throw PipelineError("dpsi|_D is not simple: Pluecker residual " + std::to_string(f.plucker_residual));
  int a = 0, b = 1;
  double best = -1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (magnitude(w(i, j)) > best) {
        best = magnitude(w(i, j));
        a = i;
        b = j;
      }
  if (best <= 0.0) throw PipelineError("dpsi|_D vanishes");
  Complex<T> inv = Complex<T>(T(1.0)) / w(a, b);
  for (int k = 0; k < 4; ++k) {
    f.alpha(0, k) = w(a, k) * inv;
    f.beta(0, k) = w(b, k);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Complex<T> ab = f.alpha(0, i) * f.beta(0, j) - f.alpha(0, j) * f.beta(0, i);
      f.wedge_residual = std::max(f.wedge_residual, magnitude(ab - w(i, j)));
    }
  return f;
}

struct JOnD {
  double imag_residual = 0.0;
};

/// Real complex structure on D from W = ker α ∩ ker β.
template <class T>
Matrix<T, 4, 4> complex_structure_from_kernel(const FactorizationT<T>& f, KernelConvention conv,
                                              double* imag_residual = nullptr) {
  Matrix<Complex<T>, 2, 4> ab;
  for (int k = 0; k < 4; ++k) {
    ab(0, k) = f.alpha(0, k);
    ab(1, k) = f.beta(0, k);
  }
  auto w = null_space(ab, 1e-9);
  Matrix<Complex<T>, 4, 4> basis;
  for (int j = 0; j < 2; ++j) {
    using std::sqrt;
    T n2(0.0);
    for (int k = 0; k < 4; ++k) n2 = n2 + abs2(w[j][k]);
    T n = sqrt(n2);
    for (int k = 0; k < 4; ++k) {
      basis(k, j) = w[j][k] / n;
      basis(k, j + 2) = conj(basis(k, j));
    }
  }
  if (magnitude(determinant(basis)) <= 1e-9) throw PipelineError("W and its conjugate intersect");
  const double s = conv == KernelConvention::MinusI ? -1.0 : 1.0;
  Matrix<Complex<T>, 4, 4> eig{};
  eig(0, 0) = eig(1, 1) = Complex<T>(T(0.0), T(s));
  eig(2, 2) = eig(3, 3) = Complex<T>(T(0.0), T(-s));
  Matrix<Complex<T>, 4, 4> jc = basis * eig * inverse(basis);
  Matrix<T, 4, 4> j;
  double im = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      j(r, c) = jc(r, c).re;
      im = std::max(im, magnitude(jc(r, c).im));
    }
  if (imag_residual) *imag_residual = im;
  return j;
}

/// J on Q in the Reeb basis: M_ψ⁻¹·M_{iψ} for ψ = p1·λ1 + p2·λ2.
template <class T>
Matrix<T, 2, 2> complex_structure_on_quotient(const Complex<T>& p1, const Complex<T>& p2) {
  Matrix<T, 2, 2> mpsi, mipsi;
  mpsi(0, 0) = p1.re;
  mpsi(0, 1) = p2.re;
  mpsi(1, 0) = p1.im;
  mpsi(1, 1) = p2.im;
  mipsi(0, 0) = -p1.im;
  mipsi(0, 1) = -p2.im;
  mipsi(1, 0) = p1.re;
  mipsi(1, 1) = p2.re;
  return solve(mpsi, mipsi);
}

/// Sign of det[e_a, J e_a, e_b, J e_b, ...] over the best-conditioned choice of basis vectors.
template <std::size_t N>
int orientation_sign(const Matrix<double, N, N>& j) {
  static_assert(N == 2 || N == 4 || N == 6);
  constexpr std::size_t m = N / 2;
  double best = 0.0;
  int sign = 0;
  std::array<std::size_t, m> idx{};
  auto consider = [&]() {
    Matrix<double, N, N> b{};
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < N; ++r) {
        b(r, 2 * q) = r == idx[q] ? 1.0 : 0.0;
        b(r, 2 * q + 1) = j(r, idx[q]);
      }
    double d = determinant(b);
    if (std::abs(d) > best) {
      best = std::abs(d);
      sign = d > 0 ? 1 : -1;
    }
  };
  if constexpr (m == 1) {
    idx[0] = 0;
    consider();
  } else if constexpr (m == 2) {
    for (idx[0] = 0; idx[0] < N; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < N; ++idx[1]) consider();
  } else {
    for (idx[0] = 0; idx[0] < N; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < N; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < N; ++idx[2]) consider();
  }
  return sign;
}

/// Pointwise data of the construction at scalar type T.
template <class T>
struct PointStructure {
  FrameData<T> frame;
  std::array<Matrix<T, 4, 4>, 2> curvature;  // dλ_k(X_i, X_j)
  Matrix<T, 2, 2> qd;
  Complex<T> t;
  bool conjugated = false;  // the conjugate root was used
  Complex<T> p1, p2;        // ψ = p1·λ1 + p2·λ2
  Matrix<Complex<T>, 4, 4> dpsi;
  FactorizationT<T> factorization;
  double jd_imag_residual = 0.0;
  Matrix<T, 4, 4> jd;
  Matrix<T, 2, 2> jq;
  Matrix<T, 6, 6> adapted;  // columns X1..X4, Z1, Z2
  Matrix<T, 6, 6> jtilde;
  int orientation = 0;      // o_D·o_Q relative to the adapted frame
};

namespace detail {

template <class T>
void build_structures(PointStructure<T>& s, const Complex<T>& t, const PipelineOptions& opt) {
  s.t = t;
  Complex<T> c(T(opt.psi_scale.real()), T(opt.psi_scale.imag()));
  s.p1 = c;
  s.p2 = c * t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s.dpsi(i, j) = s.p1 * s.curvature[0](i, j) + s.p2 * s.curvature[1](i, j);
  s.factorization = factor_two_form(s.dpsi);
  s.jd = complex_structure_from_kernel(s.factorization, opt.kernel, &s.jd_imag_residual);
  s.jq = complex_structure_on_quotient(s.p1, s.p2);
  if (opt.negate_jq) s.jq = -s.jq;
  Matrix<double, 4, 4> jdv = values(s.jd);
  Matrix<double, 2, 2> jqv = values(s.jq);
  s.orientation = orientation_sign(jdv) * orientation_sign(jqv);
}

}  // namespace detail

/// Root, factorization, J on D, J on Q and the Reeb-splitting extension J̃ at p.
template <class T>
PointStructure<T> tilde_structure(const Distribution& d, const Coords<T>& p, const PipelineOptions& opt = {}) {
  if (!d.has_reeb()) throw DistributionError("the construction needs a Reeb pair");
  PointStructure<T> s;
  s.frame = d.frame_at(p);
  s.curvature = {s.frame.curvature(0), s.frame.curvature(1)};
  s.qd(0, 0) = wedge4(s.curvature[0], s.curvature[0]);
  s.qd(0, 1) = s.qd(1, 0) = wedge4(s.curvature[0], s.curvature[1]);
  s.qd(1, 1) = wedge4(s.curvature[1], s.curvature[1]);
  Classification cls = classify_matrix(values(s.qd), opt.tol);
  if (cls.kind != Kind::Elliptic) throw NonEllipticError(cls);

  Complex<T> t = upper_root(s.qd(0, 0), s.qd(0, 1), s.qd(1, 1));
  if (opt.root == RootChoice::Lower) {
    t = conj(t);
    s.conjugated = true;
  }
  detail::build_structures(s, t, opt);
  if (opt.root == RootChoice::Auto && s.orientation < 0) {
    s.conjugated = true;
    detail::build_structures(s, conj(t), opt);
  }
  s.adapted = s.frame.adapted_frame();
  s.jtilde = s.adapted * block_diag(s.jd, s.jq) * inverse(s.adapted);
  return s;
}

template <class T>
Coords<Dual<T>> seed_direction(const Coords<T>& p, const Vec<T, 6>& dir) {
  Coords<Dual<T>> q;
  for (int k = 0; k < kDim; ++k) q[k] = Dual<T>(p[k], dir[k]);
  return q;
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> derivative_part(const Matrix<Dual<T>, R, C>& m) {
  return map<T>(m, [](const Dual<T>& x) { return x.d; });
}

template <class T, std::size_t R, std::size_t C>
Matrix<T, R, C> value_part(const Matrix<Dual<T>, R, C>& m) {
  return map<T>(m, [](const Dual<T>& x) { return x.v; });
}

/// Correction K: TM → D (framing coordinates) and the canonical J at p.
template <class T>
struct CorrectionT {
  Matrix<T, 4, 2> on_reeb;  // K(Z1), K(Z2)
  Matrix<T, 4, 6> k;        // K as a map from coordinate vectors
  Matrix<T, 6, 6> jfull;
  double residual = 0.0;    // least-squares residual of the Levi system (worst of the two)
};

/// Solves L(K u, v) = J_Q·P(v) for u = Z1, Z2, where P is the J-linear part of
/// S̃(u, ·) = q([u, ·]) + J_Q q([J̃u, ·]).
template <class T>
CorrectionT<T> correction(const Distribution& d, const Coords<T>& p, const PointStructure<T>& s,
                          const PipelineOptions& opt = {}) {
  using D1 = Dual<T>;
  const FrameData<T>& f = s.frame;
  Matrix<T, 6, 2> jz = s.jtilde * f.reeb;

  // Reeb field derivatives along X_k and J̃ along X_k.
  std::array<Matrix<T, 6, 2>, 4> dz_along_x;
  std::array<Matrix<T, 6, 2>, 4> djz_along_x;  // ∂_{X_k}(J̃ Z_i)
  for (int k = 0; k < 4; ++k) {
    Coords<D1> q = seed_direction(p, f.framing.column(k));
    Matrix<D1, 6, 2> zq = d.reeb_at(q);
    PointStructure<D1> sq = tilde_structure(d, q, opt);
    dz_along_x[k] = derivative_part(zq);
    djz_along_x[k] = derivative_part(Matrix<D1, 6, 2>(sq.jtilde * zq));
  }

  CorrectionT<T> out;
  for (int i = 0; i < 2; ++i) {
    Matrix<T, 6, 4> dx_along_z = derivative_part(d.framing_at(seed_direction(p, f.reeb.column(i))));
    Matrix<T, 6, 4> dx_along_jz = derivative_part(d.framing_at(seed_direction(p, jz.column(i))));
    std::array<Vec<T, 2>, 4> sv;
    for (int k = 0; k < 4; ++k) {
      Vec<T, 6> b1 = dx_along_z.column(k) - dz_along_x[k].column(i);
      Vec<T, 6> b2 = dx_along_jz.column(k) - djz_along_x[k].column(i);
      sv[k] = f.project(b1) + s.jq * f.project(b2);
    }
    Matrix<T, 8, 4> a;
    Vec<T, 8> rhs;
    for (int j = 0; j < 4; ++j) {
      Vec<T, 2> sjv{};
      for (int k = 0; k < 4; ++k) sjv = sjv + s.jd(k, j) * sv[k];
      Vec<T, 2> pj = 0.5 * (sv[j] - s.jq * sjv);
      Vec<T, 2> g = s.jq * pj;
      for (int c = 0; c < 2; ++c) {
        for (int m = 0; m < 4; ++m) a(2 * j + c, m) = -s.curvature[c](m, j);
        rhs[2 * j + c] = g[c];
      }
    }
    LeastSquares<T, 4> ls = least_squares(a, rhs);
    out.residual = std::max(out.residual, ls.residual);
    for (int m = 0; m < 4; ++m) out.on_reeb(m, i) = ls.x[m];
  }
  if (opt.enforce_k_residual && !(out.residual <= opt.k_residual_tol))
    throw PipelineError("Levi system for K is inconsistent: residual " + std::to_string(out.residual));
  out.k = out.on_reeb * f.lambda;
  out.jfull = s.jtilde + f.framing * out.k;
  return out;
}

/// Canonical J as a 6×6 matrix in coordinates at p (any scalar type).
template <class T>
Matrix<T, 6, 6> canonical_j_matrix(const Distribution& d, const Coords<T>& p, const PipelineOptions& opt = {}) {
  PointStructure<T> s = tilde_structure(d, p, opt);
  return correction(d, p, s, opt).jfull;
}

// ---- double-precision stage API ----

inline Factorization factor_dpsi(const Distribution& d, const RootData& t, const Point& p,
                                 std::complex<double> scale = {1.0, 0.0}) {
  FrameData<double> f = d.frame_at(p);
  Matrix<Complex<double>, 4, 4> w;
  std::array<Matrix<double, 4, 4>, 2> c = {f.curvature(0), f.curvature(1)};
  std::complex<double> p1 = scale, p2 = scale * t.t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = Complex<double>(p1 * c[0](i, j) + p2 * c[1](i, j));
  return factor_two_form(w);
}

inline Matrix<double, 4, 4> j_on_D(const Factorization& f, const Distribution&, const Point&,
                                   KernelConvention conv = KernelConvention::MinusI) {
  return complex_structure_from_kernel(f, conv);
}

inline Matrix<double, 2, 2> j_on_Q(const Distribution& d, const RootData& t, std::complex<double> scale = {1.0, 0.0}) {
  if (!d.has_reeb()) throw DistributionError("J on Q needs a Reeb pair");
  if (!(t.t.imag() > 1e-12)) throw PipelineError("root is not in the upper half plane");
  std::complex<double> p2 = scale * t.t;
  return complex_structure_on_quotient(Complex<double>(scale), Complex<double>(p2));
}

inline Matrix<double, 6, 6> extend_j_tilde(const Matrix<double, 4, 4>& jd, const Matrix<double, 2, 2>& jq,
                                           const Distribution& d, const Point& p) {
  if (!d.has_reeb()) throw DistributionError("the extension needs a Reeb pair");
  Matrix<double, 6, 6> f = d.frame_at(p).adapted_frame();
  return f * block_diag(jd, jq) * inverse(f);
}

struct KData {
  Matrix<double, 4, 2> on_reeb;
  Matrix<double, 4, 6> k;
  double residual = 0.0;
};

inline KData compute_K(const Distribution& d, const Point& p, const PipelineOptions& opt = {}) {
  PointStructure<double> s = tilde_structure(d, p, opt);
  CorrectionT<double> c = correction(d, p, s, opt);
  return {c.on_reeb, c.k, c.residual};
}

struct ComplexStructureData {
  RootData root;
  bool conjugated = false;
  Factorization factorization;
  Matrix<double, 4, 4> j_D;
  Matrix<double, 2, 2> j_Q;
  Matrix<double, 6, 6> j_tilde;
  Matrix<double, 4, 2> K_on_reeb;
  Matrix<double, 4, 6> K;  // TM → D in framing coordinates
  Matrix<double, 6, 6> j_full;
  double k_residual = 0.0;
  double jd_imag_residual = 0.0;
  int orientation = 0;     // sign of the orientation J_full induces relative to (X1..X4, Z1, Z2)
};

inline ComplexStructureData canonical_J(const Distribution& d, const Point& p, const PipelineOptions& opt = {}) {
  PointStructure<double> s = tilde_structure(d, p, opt);
  CorrectionT<double> c = correction(d, p, s, opt);
  ComplexStructureData out;
  out.root = {{s.t.re, s.t.im}, s.qd(0, 0) * s.qd(1, 1) - s.qd(0, 1) * s.qd(0, 1)};
  out.conjugated = s.conjugated;
  out.factorization = s.factorization;
  out.j_D = s.jd;
  out.j_Q = s.jq;
  out.j_tilde = s.jtilde;
  out.K_on_reeb = c.on_reeb;
  out.K = c.k;
  out.j_full = c.jfull;
  out.k_residual = c.residual;
  out.jd_imag_residual = s.jd_imag_residual;
  out.orientation = orientation_sign(Matrix<double, 6, 6>(inverse(s.adapted) * c.jfull * s.adapted));
  return out;
}

// ---- obstruction tensor and the characterizing conditions ----

/// Vector field known through its value and directional derivatives at one point.
struct LocalField {
  Vec<double, 6> value;
  std::function<Vec<double, 6>(const Vec<double, 6>&)> derivative;
};

inline Vec<double, 6> bracket(const LocalField& u, const LocalField& v) {
  return v.derivative(u.value) - u.derivative(v.value);
}

/// Canonical J near p: value and directional derivatives by forward-mode AD.
class JField {
 public:
  JField(const Distribution& d, const Point& p, const PipelineOptions& opt) : d_(&d), p_(p), opt_(opt) {
    value_ = canonical_j_matrix<double>(d, p, opt);
  }
  const Matrix<double, 6, 6>& value() const { return value_; }
  Matrix<double, 6, 6> derivative(const Vec<double, 6>& dir) const {
    return derivative_part(canonical_j_matrix<Dual<double>>(*d_, seed_direction(p_, dir), opt_));
  }
  LocalField apply(const LocalField& u) const {
    LocalField r;
    r.value = value_ * u.value;
    r.derivative = [this, u](const Vec<double, 6>& dir) { return derivative(dir) * u.value + value_ * u.derivative(dir); };
    return r;
  }

 private:
  const Distribution* d_;
  Point p_;
  PipelineOptions opt_;
  Matrix<double, 6, 6> value_;
};

inline LocalField local_field(const VectorField& x, const Point& p) {
  auto tape = std::make_shared<ExprTape>(std::vector<Expr>(x.coefficients().begin(), x.coefficients().end()));
  LocalField f;
  auto v = tape->evaluate<double>(p);
  for (int k = 0; k < kDim; ++k) f.value[k] = v[k].re;
  f.derivative = [tape, p](const Vec<double, 6>& dir) {
    auto w = tape->evaluate<Dual<double>>(seed_direction(p, dir));
    Vec<double, 6> r;
    for (int k = 0; k < kDim; ++k) r[k] = w[k].re.d;
    return r;
  };
  return f;
}

inline LocalField framing_field(const Distribution& d, const Point& p, int j) {
  LocalField f;
  f.value = d.framing_at(p).column(j);
  f.derivative = [&d, p, j](const Vec<double, 6>& dir) {
    return derivative_part(d.framing_at(seed_direction(p, dir))).column(j);
  };
  return f;
}

inline LocalField reeb_field(const Distribution& d, const Point& p, int i) {
  LocalField f;
  f.value = d.reeb_at(p).column(i);
  f.derivative = [&d, p, i](const Vec<double, 6>& dir) {
    return derivative_part(d.reeb_at(seed_direction(p, dir))).column(i);
  };
  return f;
}

inline LocalField constant_field(const Vec<double, 6>& v) {
  return {v, [](const Vec<double, 6>&) { return Vec<double, 6>{}; }};
}

/// S(u, v) = [u, v] + J[Ju, v] mod D, in the Reeb basis.
inline QuotientVector obstruction(const JField& j, const Matrix<double, 2, 6>& lambda, const LocalField& u,
                                  const LocalField& v) {
  LocalField ju = j.apply(u);
  return lambda * (bracket(u, v) + j.value() * bracket(ju, v));
}

struct STensorReport {
  Point point{};
  std::array<std::array<QuotientVector, 4>, 2> values{};  // [i][j] = S(Z_{i+1}, X_{j+1})
  double frobenius_norm = 0.0;
  std::optional<std::array<double, 2>> closed_form_A1_A2;
};

inline STensorReport s_tensor(const Distribution& d, const Point& p, const PipelineOptions& opt = {}) {
  STensorReport r;
  r.point = p;
  JField j(d, p, opt);
  Matrix<double, 2, 6> lambda = d.frame_at(p).lambda;
  double s2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    LocalField z = reeb_field(d, p, i);
    for (int k = 0; k < 4; ++k) {
      r.values[i][k] = obstruction(j, lambda, z, framing_field(d, p, k));
      s2 += r.values[i][k][0] * r.values[i][k][0] + r.values[i][k][1] * r.values[i][k][1];
    }
  }
  r.frobenius_norm = std::sqrt(s2);
  return r;
}

/// S for arbitrary symbolic fields u and v.
inline QuotientVector s_value(const Distribution& d, const Point& p, const VectorField& u, const VectorField& v,
                              const PipelineOptions& opt = {}) {
  JField j(d, p, opt);
  return obstruction(j, d.frame_at(p).lambda, local_field(u, p), local_field(v, p));
}

struct ConditionResiduals {
  double j_squared = 0.0;      // max |J² + I|
  double preserves_D = 0.0;    // max |q(J X_j)|
  int orientation = 0;
  double bilinear = 0.0;       // condition iii: max ‖q([u,v] + J[Ju,v])‖ over framing pairs
  double mixed = 0.0;          // condition iv over coordinate directions u and framing v
};

/// Numeric residuals of the four characterizing conditions at p.
inline ConditionResiduals check_conditions(const Distribution& d, const Point& p, const PipelineOptions& opt = {}) {
  ConditionResiduals r;
  JField j(d, p, opt);
  FrameData<double> f = d.frame_at(p);
  r.j_squared = max_abs(j.value() * j.value() + Matrix<double, 6, 6>::identity());
  r.preserves_D = max_abs(f.lambda * j.value() * f.framing);
  Matrix<double, 6, 6> adapted = f.adapted_frame();
  r.orientation = orientation_sign(Matrix<double, 6, 6>(inverse(adapted) * j.value() * adapted));

  std::array<LocalField, 4> x;
  for (int k = 0; k < 4; ++k) x[k] = framing_field(d, p, k);
  auto norm2 = [](const QuotientVector& q) { return std::hypot(q[0], q[1]); };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      r.bilinear = std::max(r.bilinear, norm2(obstruction(j, f.lambda, x[a], x[b])));
    }
  std::array<LocalField, 4> jx;
  for (int k = 0; k < 4; ++k) jx[k] = j.apply(x[k]);
  for (int c = 0; c < kDim; ++c) {
    Vec<double, 6> e{};
    e[c] = 1.0;
    LocalField u = constant_field(e);
    LocalField ju = j.apply(u);
    for (int k = 0; k < 4; ++k) {
      Vec<double, 6> w = bracket(u, x[k]) + j.value() * bracket(ju, x[k]) - j.value() * bracket(u, jx[k]) +
                         bracket(ju, jx[k]);
      r.mixed = std::max(r.mixed, norm2(f.lambda * w));
    }
  }
  return r;
}

/// E = 2[J̃R, ν] − J̃[J̃R, ν] − [J̃R, J̃ν] with J̃ the Reeb-splitting extension
/// (no K correction), projected to Q. Diagnostic for comparing hand reductions.
inline QuotientVector tilde_reduction(const Distribution& d, const Point& p, const VectorField& r,
                                      const VectorField& nu, const PipelineOptions& opt) {
  PointStructure<double> s = tilde_structure(d, p, opt);
  auto jt_derivative = [&](const Vec<double, 6>& dir) {
    return derivative_part(tilde_structure<Dual<double>>(d, seed_direction(p, dir), opt).jtilde);
  };
  LocalField rf = local_field(r, p), nf = local_field(nu, p);
  auto apply = [&](const LocalField& u) {
    LocalField o;
    o.value = s.jtilde * u.value;
    o.derivative = [&, u](const Vec<double, 6>& dir) { return jt_derivative(dir) * u.value + s.jtilde * u.derivative(dir); };
    return o;
  };
  LocalField jr = apply(rf), jn = apply(nf);
  Vec<double, 6> b = bracket(jr, nf);
  Vec<double, 6> e = 2.0 * b - s.jtilde * b - bracket(jr, jn);
  return s.frame.lambda * e;
}

// ---- closed forms for the semi-global model ----

/// (A1, A2) as functions of x2 on |x2| < 1.
template <class T>
std::array<T, 2> a1_a2(const T& x2) {
  using std::sqrt;
  T c = x2 * x2 + 1.0;
  T delta = sqrt(3.0 - 2.0 * x2 * x2 - x2 * x2 * x2 * x2);
  T d3 = delta * delta * delta;
  T a1 = (4.0 * x2 * c / d3) * (2.0 - 4.0 / (c * delta));
  T a2 = (c / delta) * (8.0 * x2 / d3) * (-2.0) * (delta / c + 1.0 / delta - 1.0);
  return {a1, a2};
}

inline std::array<double, 2> a1_a2_closed_form(double x2) {
  if (!(std::abs(x2) < 1.0)) throw std::domain_error("closed forms need |x2| < 1");
  return a1_a2(x2);
}

/// Zeros of A1 on (lo, hi): sign changes of A1 on a 10^4-point grid refined by
/// bisection, plus tangential zeros located as sign changes of A1' with |A1| ≤ value_tol.
inline std::vector<double> zero_set_A1(double lo, double hi, double tol = 1e-13, double value_tol = 1e-12) {
  if (!(lo > -1.0 && hi < 1.0 && lo < hi)) throw std::domain_error("interval must lie inside (-1, 1)");
  constexpr int kGrid = 10000;
  auto f = [](double x) { return a1_a2(x)[0]; };
  auto df = [](double x) { return a1_a2(Dual<double>(x, 1.0))[0].d; };
  auto bisect = [&](auto&& g, double a, double b) {
    double ga = g(a);
    while (b - a > tol) {
      double m = 0.5 * (a + b);
      double gm = g(m);
      if (gm == 0.0) return m;
      if ((gm < 0) == (ga < 0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };
  std::vector<double> roots;
  auto add = [&](double r) {
    for (double q : roots)
      if (std::abs(q - r) < 1e-9) return;
    roots.push_back(r);
  };
  double h = (hi - lo) / (kGrid - 1);
  for (int i = 0; i < kGrid - 1; ++i) {
    double a = lo + h * i, b = lo + h * (i + 1);
    double fa = f(a), fb = f(b);
    if (fa == 0.0) add(a);
    if ((fa < 0) != (fb < 0) && fb != 0.0) add(bisect(f, a, b));
    double da = df(a), db = df(b);
    if ((da < 0) != (db < 0)) {
      double m = bisect(df, a, b);
      if (std::abs(f(m)) <= value_tol) add(m);
    }
  }
  if (f(hi) == 0.0) add(hi);
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace corank2
