#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "corank2/cap_eastwood.hpp"
#include "corank2/catalog.hpp"
#include "corank2/oracle.hpp"

namespace corank2 {

struct ChecklistItem {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // worst violation measure, NaN when the check threw
  std::string claim;      // the claim being checked
  std::string detail;
};

struct ChecklistOptions {
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> extra_kappa;  // appended to the κ lists of the h_kappa items
  PipelineOptions pipeline;
};

namespace checklist_detail {

inline std::vector<Point> samples(const Box& box, int n, std::uint64_t seed) {
  QuasiRandomSampler s(box, seed);
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) out.push_back(s.next());
  return out;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline double delta(double x2) { return std::sqrt(3.0 - 2.0 * x2 * x2 - x2 * x2 * x2 * x2); }

inline Point on_x2(double x2) {
  Point p{};
  p[index_of(Coordinate::x2)] = x2;
  return p;
}

inline Box elliptic_band(double a) { return Box::cube(1.0).with(Coordinate::x2, -a, a); }

}  // namespace checklist_detail

/// Runs the numbered verification items. Each item is independent; exceptions
/// inside an item fail that item only.
inline std::vector<ChecklistItem> run_checklist(const ChecklistOptions& opt = {}) {
  using namespace checklist_detail;
  std::vector<ChecklistItem> items;
  const PipelineOptions& po = opt.pipeline;
  const CatalogModel paper = load_model("paper_D");
  const CatalogModel flat = load_model("flat_elliptic");
  const int x2i = index_of(Coordinate::x2);

  auto run = [&](std::string name, std::string claim, const std::function<void(ChecklistItem&)>& body) {
    ChecklistItem it;
    it.name = std::move(name);
    it.claim = std::move(claim);
    try {
      body(it);
    } catch (const std::exception& e) {
      it.passed = false;
      it.residual = NAN;
      it.detail = e.what();
    }
    items.push_back(std::move(it));
  };

  std::vector<std::string> kappas_reeb = {"sin(y1)", "y1^2"};
  std::vector<std::string> kappas_family = {"0", "sin(y1)", "y1^2", "atan(y1)"};
  for (const auto& k : opt.extra_kappa) {
    kappas_reeb.push_back(k);
    kappas_family.push_back(k);
  }

  run("fatness-region", "fatness region of the semi-global model", [&](ChecklistItem& it) {
    const double xs[] = {-1.5, -0.99, -0.5, 0.0, 0.5, 0.99, 1.5};
    const Kind want[] = {Kind::Hyperbolic, Kind::Elliptic, Kind::Elliptic, Kind::Elliptic,
                         Kind::Elliptic,   Kind::Elliptic, Kind::Hyperbolic};
    bool kinds = true;
    for (int i = 0; i < 7; ++i) {
      Classification c = classify_point(paper.distribution, on_x2(xs[i]), po.tol);
      kinds = kinds && c.kind == want[i];
      double law = 4.0 - std::pow(xs[i] * xs[i] + 1.0, 2);
      it.residual = std::max(it.residual, std::abs(c.det - law));
    }
    for (double x : {-1.0, 1.0}) it.residual = std::max(it.residual, std::abs(classify_point(paper.distribution, on_x2(x)).det));
    it.passed = kinds && it.residual <= 1e-12;
    it.detail = std::string(kinds ? "classes match" : "class mismatch") + ", det error " + fmt("%.3e", it.residual);
  });

  run("qd-identity", "quadratic form matrix of the semi-global model", [&](ChecklistItem& it) {
    QdMatrix m = qd_matrix(paper.distribution);
    Expr x2 = Expr::var(x2i);
    Expr off = -(x2 * x2) - Expr(1.0);
    SampledOptions so{opt.seed};
    const Box& box = paper.distribution.domain();
    it.residual = std::max({max_sampled_difference(m.m11, Expr(2.0), box, 100, so),
                            max_sampled_difference(m.m12, off, box, 100, so),
                            max_sampled_difference(m.m22, Expr(2.0), box, 100, so)});
    it.passed = expr_equal_sampled(m.m11, Expr(2.0), box, 100, 1e-10, so) &&
                expr_equal_sampled(m.m12, off, box, 100, 1e-10, so) &&
                expr_equal_sampled(m.m22, Expr(2.0), box, 100, 1e-10, so);
    it.detail = "100 points, max difference " + fmt("%.3e", it.residual);
  });

  run("reeb-directions", "Reeb directions of the catalog models", [&](ChecklistItem& it) {
    std::vector<CatalogModel> models = {paper, flat, load_model("flat_hyperbolic"), load_model("global_xi")};
    for (const auto& k : kappas_reeb) models.push_back(load_model("h_kappa", k));
    it.passed = true;
    for (const auto& m : models) {
      ReebOptions ro;
      ro.seed = opt.seed;
      const ReebPair& r = *m.distribution.reeb();
      ReebReport rep = verify_reeb(m.distribution, r.z1, r.z2, ro);
      for (int c = 1; c < 4; ++c) it.residual = std::max(it.residual, rep.conditions[c].residual);
      if (!rep.passed()) {
        it.passed = false;
        it.detail += m.name + (m.kappa_text ? "(" + *m.kappa_text + ")" : "") + " fails; ";
      }
    }
    if (it.passed) it.detail = std::to_string(models.size()) + " models, 50 points each";
  });

  const std::vector<Point> band20 = samples(elliptic_band(0.95), 20, opt.seed);

  run("root-and-jq", "complex root and induced structure on Q", [&](ChecklistItem& it) {
    QdMatrix m = qd_matrix(paper.distribution);
    for (const Point& p : band20) {
      double x2 = p[x2i], c = x2 * x2 + 1.0, d = delta(x2);
      RootData r = find_root(m, p, po.tol);
      it.residual = std::max(it.residual, std::abs(r.t - std::complex<double>(c / 2.0, d / 2.0)));
      Matrix<double, 2, 2> jq = j_on_Q(paper.distribution, r);
      Matrix<double, 2, 2> want;
      want(0, 0) = -c / d;
      want(0, 1) = -2.0 / d;
      want(1, 0) = 2.0 / d;
      want(1, 1) = c / d;
      it.residual = std::max(it.residual, max_abs_diff(jq, want));
    }
    it.passed = it.residual <= 1e-10;
    it.detail = "20 points, max error " + fmt("%.3e", it.residual);
  });

  run("factorization", "simple decomposition of dpsi on D and J on nu", [&](ChecklistItem& it) {
    double simple = 0.0, jnu = 0.0;
    QdMatrix m = qd_matrix(paper.distribution);
    for (const Point& p : band20) {
      double x2 = p[x2i], c = x2 * x2 + 1.0, d = delta(x2);
      RootData r = find_root(m, p, po.tol);
      Factorization f = factor_dpsi(paper.distribution, r, p, po.psi_scale);
      simple = std::max({simple, f.plucker_residual, f.wedge_residual});
      Matrix<double, 4, 4> jd = j_on_D(f, paper.distribution, p, po.kernel);
      Vec<double, 4> nu{};
      nu[1] = 1.0;  // ν = X2
      Vec<double, 4> want{};
      want[0] = -2.0 / d;
      want[1] = c / d;
      jnu = std::max(jnu, max_abs_diff(Vec<double, 4>(jd * nu), want));
    }
    it.residual = std::max(simple, jnu);
    it.passed = simple < 1e-9 && jnu <= 1e-9;
    it.detail = "simplicity " + fmt("%.3e", simple) + ", J(nu) vs closed form " + fmt("%.3e", jnu);
  });

  run("flat-vanishing", "flat model has vanishing obstruction", [&](ChecklistItem& it) {
    NumericOracle o(flat.distribution);
    for (const Point& p : samples(Box::cube(1.5), 100, opt.seed)) {
      double s2 = 0.0;
      for (const auto& row : o.s_values(p))
        for (const auto& q : row) s2 += q[0] * q[0] + q[1] * q[1];
      it.residual = std::max(it.residual, std::sqrt(s2));
    }
    it.passed = it.residual < 1e-7;
    it.detail = "finite-difference S norm over 100 points " + fmt("%.3e", it.residual);
  });

  const std::vector<Point> band50 = samples(elliptic_band(0.95), 50, opt.seed);
  std::vector<QuotientVector> s_nu;
  auto s_on_nu = [&]() -> const std::vector<QuotientVector>& {
    if (s_nu.empty())
      for (const Point& p : band50) s_nu.push_back(s_tensor(paper.distribution, p, po).values[1][1]);
    return s_nu;
  };

  run("nonvanishing-obstruction", "non-vanishing obstruction and zeros of A1", [&](ChecklistItem& it) {
    double match = 0.0;
    const auto& s = s_on_nu();
    for (std::size_t i = 0; i < band50.size(); ++i)
      match = std::max(match, std::abs(s[i][0] - a1_a2_closed_form(band50[i][x2i])[0]));
    double smallest = INFINITY;
    for (double x : {-0.9, -0.5, -0.3, -0.2, 0.2, 0.3, 0.5, 0.9})
      smallest = std::min(smallest, std::abs(a1_a2_closed_form(x)[0]));
    std::vector<double> zeros = zero_set_A1(-0.99, 0.99);
    double root_err = 0.0;
    for (double z : zeros)
      if (std::abs(z) > 1e-6) root_err = std::max(root_err, std::abs(z * z - (std::sqrt(2.0) - 1.0)));
    bool zero_ok = zeros.size() == 3 && root_err < 1e-9;
    it.residual = match;
    it.passed = match <= 1e-6 && smallest > 1e-4 && zero_ok;
    it.detail = "S z1 vs A1 " + fmt("%.3e", match) + (match <= 1e-6 ? " ok" : " FAIL") + "; min |A1| " +
                fmt("%.3e", smallest) + (smallest > 1e-4 ? " ok" : " FAIL") + "; " + std::to_string(zeros.size()) +
                " zeros, root^2 error " + fmt("%.3e", root_err) + (zero_ok ? " ok" : " FAIL");
  });

  run("a2-agreement", "closed form of A2", [&](ChecklistItem& it) {
    const auto& s = s_on_nu();
    for (std::size_t i = 0; i < band50.size(); ++i)
      it.residual = std::max(it.residual, std::abs(s[i][1] - a1_a2_closed_form(band50[i][x2i])[1]));
    it.passed = it.residual <= 1e-6;
    it.detail = "S z2 vs A2 over 50 points " + fmt("%.3e", it.residual);
  });

  run("ce-conditions", "conditions of the canonical almost complex structure", [&](ChecklistItem& it) {
    PipelineOptions o = po;
    o.enforce_k_residual = false;
    double j2 = 0.0, iii = 0.0, iv = 0.0, kres = 0.0;
    bool orient = true;
    for (const CatalogModel* m : {&paper, &flat}) {
      Box box = m == &paper ? elliptic_band(0.95) : Box::cube(1.0);
      for (const Point& p : samples(box, 20, opt.seed)) {
        ConditionResiduals r = check_conditions(m->distribution, p, o);
        j2 = std::max({j2, r.j_squared, r.preserves_D});
        iii = std::max(iii, r.bilinear);
        iv = std::max(iv, r.mixed);
        orient = orient && r.orientation == 1;
        kres = std::max(kres, compute_K(m->distribution, p, o).residual);
      }
    }
    it.residual = std::max({j2, iii, iv});
    it.passed = j2 <= 1e-9 && iii < 1e-7 && iv < 1e-6 && orient && kres < o.k_residual_tol;
    it.detail = "J^2+I " + fmt("%.3e", j2) + ", iii " + fmt("%.3e", iii) + ", iv " + fmt("%.3e", iv) +
                ", K residual " + fmt("%.3e", kres) + (orient ? "" : ", orientation FAIL");
  });

  run("conjugate-root", "conjugate root yields -J and the same S", [&](ChecklistItem& it) {
    PipelineOptions up = po, lo = po;
    up.root = RootChoice::Upper;
    lo.root = RootChoice::Lower;
    double jneg = 0.0, sdiff = 0.0;
    for (const CatalogModel* m : {&paper, &flat}) {
      Box box = m == &paper ? elliptic_band(0.9) : Box::cube(1.0);
      for (const Point& p : samples(box, 10, opt.seed)) {
        ComplexStructureData a = canonical_J(m->distribution, p, up), b = canonical_J(m->distribution, p, lo);
        jneg = std::max({jneg, max_abs(a.j_D + b.j_D), max_abs(a.j_Q + b.j_Q), max_abs(a.j_tilde + b.j_tilde),
                         max_abs(a.j_full + b.j_full)});
        STensorReport sa = s_tensor(m->distribution, p, up), sb = s_tensor(m->distribution, p, lo);
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 4; ++k) sdiff = std::max(sdiff, max_abs(sa.values[i][k] - sb.values[i][k]));
      }
    }
    it.residual = std::max(jneg, sdiff);
    it.passed = jneg <= 1e-10 && sdiff <= 1e-7;
    it.detail = "J(t) + J(conj t) " + fmt("%.3e", jneg) + ", S difference " + fmt("%.3e", sdiff);
  });

  run("globalization", "globalization diffeomorphism and global fat germ", [&](ChecklistItem& it) {
    GlobalizationReport g = verify_globalization(50, opt.seed);
    it.passed = g.passed();
    for (const auto& c : g.checks) {
      if (c.name.find("elliptic") == std::string::npos) it.residual = std::max(it.residual, c.residual);
      if (!c.passed) it.detail += c.name + " fails; ";
    }
    if (it.passed) it.detail = "pullbacks and composition " + fmt("%.3e", it.residual) + ", elliptic and Reeb incl. |x2~| = 500";
  });

  run("kappa-family", "kappa-family shares q_D and S", [&](ChecklistItem& it) {
    QdMatrix base = qd_matrix(paper.distribution);
    std::vector<Point> pts = samples(elliptic_band(0.9), 10, opt.seed);
    for (Point& p : pts) p[index_of(Coordinate::y1)] = 0.0;
    std::vector<QuotientVector> ref;
    for (const Point& p : pts) ref.push_back(s_tensor(paper.distribution, p, po).values[1][1]);
    double qd = 0.0, sd = 0.0, smallest = INFINITY;
    bool equal = true;
    SampledOptions so{opt.seed};
    for (const auto& k : kappas_family) {
      CatalogModel m = load_model("h_kappa", k);
      QdMatrix q = qd_matrix(m.distribution);
      const Box& box = m.distribution.domain();
      for (auto [a, b] : {std::pair{q.m11, base.m11}, std::pair{q.m12, base.m12}, std::pair{q.m22, base.m22}}) {
        equal = equal && expr_equal_sampled(a, b, box, 100, 1e-10, so);
        qd = std::max(qd, max_sampled_difference(a, b, box, 100, so));
      }
      for (std::size_t i = 0; i < pts.size(); ++i)
        sd = std::max(sd, max_abs(s_tensor(m.distribution, pts[i], po).values[1][1] - ref[i]));
      QuotientVector s3 = s_tensor(m.distribution, on_x2(0.3), po).values[1][1];
      smallest = std::min(smallest, std::hypot(s3[0], s3[1]));
    }
    it.residual = std::max(qd, sd);
    it.passed = equal && sd <= 1e-6 && smallest > 1e-4;
    it.detail = std::to_string(kappas_family.size()) + " kappas: q_D " + fmt("%.3e", qd) + ", S spread " +
                fmt("%.3e", sd) + ", |S| at x2=0.3 >= " + fmt("%.3e", smallest);
  });

  run("oracle-equivalence", "numeric oracle agrees with the symbolic pipeline", [&](ChecklistItem& it) {
    struct Case {
      std::string name;
      std::optional<std::string> kappa;
      Box box;
    };
    const double far = std::tan(0.4 * kPi);
    std::vector<Case> cases = {{"paper_D", std::nullopt, Box::cube(1.5).with(Coordinate::x2, -0.8, 0.8)},
                               {"h_kappa", "sin(y1)", Box::cube(1.5).with(Coordinate::x2, -0.8, 0.8)},
                               {"flat_elliptic", std::nullopt, Box::cube(1.5)},
                               {"global_xi", std::nullopt, Box::cube(1.5).with(Coordinate::x2, -far, far)},
                               {"flat_hyperbolic", std::nullopt, Box::cube(1.5)}};
    double qj = 0.0, s = 0.0;
    bool refused = true;
    for (const auto& c : cases) {
      CatalogModel m = load_model(c.name, c.kappa);
      bool elliptic = c.name != "flat_hyperbolic";
      for (const Point& p : samples(c.box, 30, opt.seed)) {
        OracleResult r = numeric_oracle(m.distribution, p, elliptic);
        qj = std::max({qj, r.delta_levi, r.delta_qd, r.delta_j});
        s = std::max(s, r.delta_s);
        if (!elliptic) {
          refused = refused && r.kind == Kind::Hyperbolic;
          try {
            canonical_J(m.distribution, p, po);
            refused = false;
          } catch (const NonEllipticError&) {
          }
        }
      }
    }
    it.residual = std::max(qj, s);
    it.passed = qj <= 1e-6 && s <= 1e-5 && refused;
    it.detail = "q_D/J delta " + fmt("%.3e", qj) + ", S delta " + fmt("%.3e", s) +
                (refused ? "" : ", hyperbolic model not refused");
  });

  return items;
}

}  // namespace corank2
