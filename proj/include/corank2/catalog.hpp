#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank2/cap_eastwood.hpp"
#include "corank2/distribution.hpp"
#include "corank2/ellipticity.hpp"

namespace corank2 {

class UnknownModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How q_D is expected to classify over the model's domain.
enum class ClassificationLaw {
  EllipticEverywhere,
  HyperbolicEverywhere,
  EllipticIffAbsX2BelowOne,
};

struct ExpectedFacts {
  ClassificationLaw law = ClassificationLaw::EllipticEverywhere;
  bool s_vanishes = false;
};

struct CatalogModel {
  std::string name;
  Distribution distribution;
  ExpectedFacts expected;
  std::optional<Expr> kappa;  // h_kappa only
  std::optional<std::string> kappa_text;
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"flat_elliptic", "flat_hyperbolic", "paper_D", "global_xi",
                                                 "h_kappa"};
  return names;
}

inline bool is_model_name(const std::string& name) {
  for (const auto& n : model_names())
    if (n == name) return true;
  return false;
}

inline constexpr double kGlobalX2Bound = 1000.0;

/// Coordinate map φ: x2 ↦ tan(πx2/2) from |x2| < 1 onto the real line.
inline CoordinateMap globalization_map() {
  CoordinateMap m = CoordinateMap::identity();
  Expr x2 = Expr::var(index_of(Coordinate::x2));
  m.forward[index_of(Coordinate::x2)] = tan(Expr(kPi / 2.0) * x2);
  m.inverse[index_of(Coordinate::x2)] = Expr(2.0 / kPi) * atan(x2);
  return m;
}

namespace detail {

inline Expr parse_kappa(const std::string& text) {
  Expr k = parse_expr(text);
  if (variables(k) & ~(1u << index_of(Coordinate::y1)))
    throw std::invalid_argument("kappa may depend on y1 only: " + text);
  return k;
}

inline ReebPair coordinate_reeb() {
  return {VectorField::coordinate(Coordinate::z1), VectorField::coordinate(Coordinate::z2)};
}

inline Form model_form(const std::string& text) { return Form::parse_one_form(text); }

/// Expected classification at p, or nullopt inside the tolerance band of the law's boundary.
inline std::optional<Kind> expected_kind(ClassificationLaw law, const Point& p) {
  switch (law) {
    case ClassificationLaw::EllipticEverywhere: return Kind::Elliptic;
    case ClassificationLaw::HyperbolicEverywhere: return Kind::Hyperbolic;
    case ClassificationLaw::EllipticIffAbsX2BelowOne: {
      double a = std::abs(p[index_of(Coordinate::x2)]);
      if (std::abs(a - 1.0) < 1e-6) return std::nullopt;
      return a < 1.0 ? Kind::Elliptic : Kind::Hyperbolic;
    }
  }
  return std::nullopt;
}

}  // namespace detail

class ModelVerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-checks the Reeb pair, the classification law and the S-vanishing flag at n sampled points.
inline void verify_expected(const CatalogModel& m, int n = 10, std::uint64_t seed = kDefaultSeed) {
  const ReebPair& r = *m.distribution.reeb();
  ReebOptions ro;
  ro.samples = n;
  ro.seed = seed;
  ReebReport rep = verify_reeb(m.distribution, r.z1, r.z2, ro);
  if (!rep.passed()) throw ModelVerificationError(m.name + ": Reeb pair check failed on load");
  QuasiRandomSampler sampler(m.distribution.domain(), seed);
  double s_max = 0.0;
  int elliptic = 0;
  for (int i = 0; i < n; ++i) {
    Point p = sampler.next();
    auto want = detail::expected_kind(m.expected.law, p);
    if (!want) continue;
    Kind got = classify_point(m.distribution, p).kind;
    if (got != *want)
      throw ModelVerificationError(m.name + ": expected " + kind_name(*want) + ", classified " + kind_name(got));
    if (got != Kind::Elliptic) continue;
    ++elliptic;
    s_max = std::max(s_max, s_tensor(m.distribution, p).frobenius_norm);
  }
  if (elliptic == 0) return;
  if (m.expected.s_vanishes && !(s_max < 1e-9))
    throw ModelVerificationError(m.name + ": obstruction expected to vanish, norm " + std::to_string(s_max));
  if (!m.expected.s_vanishes && !(s_max > 1e-6))
    throw ModelVerificationError(m.name + ": obstruction expected to be nonzero at some sample");
}

/// Builds one of the catalog models; kappa is required for h_kappa and rejected otherwise.
inline CatalogModel load_model(const std::string& name, const std::optional<std::string>& kappa = std::nullopt,
                               bool verify = true) {
  if (!is_model_name(name)) throw UnknownModel("unknown model: " + name);
  if (name == "h_kappa" && !kappa) throw std::invalid_argument("h_kappa needs --kappa");
  if (name != "h_kappa" && kappa) throw std::invalid_argument("kappa applies to h_kappa only");

  ExpectedFacts expected;
  std::optional<Expr> kappa_expr;
  Box box = Box::cube(2.0);
  Form l1(1), l2(1);
  std::optional<Framing> framing;
  if (name == "flat_elliptic") {
    l1 = detail::model_form("dz1 - y1*dx1 + y2*dx2");
    l2 = detail::model_form("dz2 - y1*dx2 - y2*dx1");
    framing = Framing{VectorField::parse("d/dx1 + y1*d/dz1 + y2*d/dz2"),
                      VectorField::parse("d/dx2 - y2*d/dz1 + y1*d/dz2"), VectorField::parse("d/dy1"),
                      VectorField::parse("d/dy2")};
    expected = {ClassificationLaw::EllipticEverywhere, true};
  } else if (name == "flat_hyperbolic") {
    l1 = detail::model_form("dz1 - y1*dx1");
    l2 = detail::model_form("dz2 - y2*dx2");
    framing = Framing{VectorField::parse("d/dx1 + y1*d/dz1"), VectorField::parse("d/dx2 + y2*d/dz2"),
                      VectorField::parse("d/dy1"), VectorField::parse("d/dy2")};
    expected = {ClassificationLaw::HyperbolicEverywhere, false};
  } else if (name == "paper_D" || name == "h_kappa") {
    std::string b = "(x2^3/3 + x2 + 2*x1)";
    if (kappa) {
      kappa_expr = detail::parse_kappa(*kappa);
      b = "(x2^3/3 + x2 + 2*x1 + (" + *kappa + "))";
    }
    l1 = detail::model_form("dz1 - y1*dx1 - y2*dx2 - " + b + "*dy1");
    l2 = detail::model_form("dz2 - y2*dx1 - y1*dx2");
    framing = Framing{VectorField::parse("d/dx1 + y1*d/dz1 + y2*d/dz2"),
                      VectorField::parse("d/dx2 + y2*d/dz1 + y1*d/dz2"), VectorField::parse("d/dy1 + " + b + "*d/dz1"),
                      VectorField::parse("d/dy2")};
    expected = {ClassificationLaw::EllipticIffAbsX2BelowOne, false};
  } else {  // global_xi
    l1 = detail::model_form(
        "dz1 - y1*dx1 - 2*y2/(pi*(1 + x2^2))*dx2 - (8/(3*pi^3)*atan(x2)^3 + 2/pi*atan(x2) + 2*x1)*dy1");
    l2 = detail::model_form("dz2 - y2*dx1 - 2*y1/(pi*(1 + x2^2))*dx2");
    box = box.with(Coordinate::x2, -kGlobalX2Bound, kGlobalX2Bound);
    expected = {ClassificationLaw::EllipticEverywhere, false};
  }
  CatalogModel m{name, build_distribution(l1, l2, framing, box).with_reeb(detail::coordinate_reeb()), expected,
                 kappa_expr, kappa};
  if (verify) verify_expected(m);
  return m;
}

struct GlobalizationReport {
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Checks that φ carries the semi-global model onto global_xi and that global_xi
/// is elliptic with the coordinate Reeb pair, including far out along x̃2.
inline GlobalizationReport verify_globalization(int samples = 50, std::uint64_t seed = kDefaultSeed) {
  GlobalizationReport rep;
  CatalogModel local = load_model("paper_D", std::nullopt, false);
  CatalogModel global = load_model("global_xi", std::nullopt, false);
  CoordinateMap phi = globalization_map();
  const double cap = std::tan(kPi / 2.0 * 0.95);
  Box source = Box::cube(2.0).with(Coordinate::x2, -0.95, 0.95);
  Box target = Box::cube(2.0).with(Coordinate::x2, -cap, cap);
  SampledOptions so{seed, 100, EvalMode::Real};

  CheckResult comp{"phi o phi^-1 = id", true, phi.composition_residual(source, target, samples, so)};
  comp.passed = comp.residual < 1e-10;
  rep.checks.push_back(comp);

  for (int i = 0; i < 2; ++i) {
    Form pulled = pullback(phi.inverted(), local.distribution.lambda(i));
    CheckResult c{"(phi^-1)* lambda" + std::to_string(i + 1) + " = beta" + std::to_string(i + 1), true, 0.0};
    for (int k = 0; k < kDim; ++k)
      c.residual = std::max(c.residual, max_sampled_difference(pulled.component(k),
                                                               global.distribution.lambda(i).component(k), target,
                                                               samples, so));
    c.passed = c.residual < 1e-9;
    rep.checks.push_back(c);
  }

  CheckResult ell{"global_xi elliptic", true, INFINITY};
  std::vector<Point> pts;
  QuasiRandomSampler sampler(global.distribution.domain(), seed);
  for (int i = 0; i < samples; ++i) pts.push_back(sampler.next());
  for (double x : {-500.0, 500.0, -kGlobalX2Bound, kGlobalX2Bound}) {
    Point p{};
    p[index_of(Coordinate::x2)] = x;
    pts.push_back(p);
  }
  for (const Point& p : pts) {
    Classification c = classify_point(global.distribution, p);
    if (c.kind != Kind::Elliptic) ell.passed = false;
    ell.residual = std::min(ell.residual, c.det);
  }
  rep.checks.push_back(ell);

  ReebOptions ro;
  ro.samples = samples;
  ro.seed = seed;
  for (double x : {-500.0, 500.0}) {
    Point p{};
    p[index_of(Coordinate::x2)] = x;
    ro.extra_points.push_back(p);
  }
  const ReebPair& r = *global.distribution.reeb();
  ReebReport rr = verify_reeb(global.distribution, r.z1, r.z2, ro);
  CheckResult reeb{"global_xi Reeb pair (d/dz1, d/dz2)", rr.passed(), 0.0};
  for (int c = 1; c < 4; ++c) reeb.residual = std::max(reeb.residual, rr.conditions[c].residual);
  rep.checks.push_back(reeb);
  return rep;
}

}  // namespace corank2
