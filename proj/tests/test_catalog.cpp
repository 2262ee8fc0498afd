#include <gtest/gtest.h>

#include "corank2/catalog.hpp"
#include "corank2/checklist.hpp"
#include "corank2/dsl.hpp"
#include "corank2/report.hpp"
#include "support.hpp"

using namespace corank2;
using corank2::testing::at_x2;
using corank2::testing::paper;

namespace {

std::string data_file(const char* name) { return read_file(std::string(CORANK2_DATA_DIR) + "/" + name); }

const ChecklistItem& find(const std::vector<ChecklistItem>& items, const std::string& name) {
  for (const auto& i : items)
    if (i.name == name) return i;
  throw std::runtime_error("no checklist item " + name);
}

}  // namespace

TEST(Catalog, Names) {
  EXPECT_EQ(model_names().size(), 5u);
  EXPECT_TRUE(is_model_name("global_xi"));
  EXPECT_FALSE(is_model_name("paper"));
  EXPECT_THROW(load_model("paper"), UnknownModel);
}

TEST(Catalog, KappaRules) {
  EXPECT_THROW(load_model("h_kappa"), std::invalid_argument);
  EXPECT_THROW(load_model("paper_D", std::string("y1")), std::invalid_argument);
  try {
    load_model("h_kappa", std::string("sin(x1)"));
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("y1 only"), std::string::npos);
  }
  EXPECT_THROW(load_model("h_kappa", std::string("sin(")), ParseError);
}

TEST(Catalog, PaperLaw) {
  CatalogModel m = load_model("paper_D");
  EXPECT_EQ(m.expected.law, ClassificationLaw::EllipticIffAbsX2BelowOne);
  for (double x : {-1.9, -1.01, -0.99, 0.0, 0.5, 0.999, 1.001, 1.7})
    EXPECT_EQ(classify_point(m.distribution, at_x2(x)).kind == Kind::Elliptic, std::abs(x) < 1.0) << x;
}

TEST(Catalog, FlatHyperbolic) {
  CatalogModel m = load_model("flat_hyperbolic");
  QuasiRandomSampler s(m.distribution.domain(), 2);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(classify_point(m.distribution, s.next()).kind, Kind::Hyperbolic);
  const ReebPair& r = *m.distribution.reeb();
  EXPECT_TRUE(verify_reeb(m.distribution, r.z1, r.z2).passed());
  EXPECT_THROW(canonical_J(m.distribution, Point{}), NonEllipticError);
}

TEST(Catalog, KappaSharesQd) {
  for (const char* k : {"0", "sin(y1)", "y1^2", "atan(y1)"}) {
    CatalogModel m = load_model("h_kappa", std::string(k));
    ASSERT_TRUE(m.kappa.has_value());
    QdMatrix a = qd_matrix(m.distribution), b = qd_matrix(paper());
    EXPECT_TRUE(expr_equal_sampled(a.m11, b.m11, Box::cube(2.0), 100, 1e-10)) << k;
    EXPECT_TRUE(expr_equal_sampled(a.m12, b.m12, Box::cube(2.0), 100, 1e-10)) << k;
    EXPECT_TRUE(expr_equal_sampled(a.m22, b.m22, Box::cube(2.0), 100, 1e-10)) << k;
  }
}

TEST(Catalog, KappaSharesObstruction) {
  CatalogModel m = load_model("h_kappa", std::string("y1^2"));
  for (double x : {-0.7, -0.2, 0.3, 0.85}) {
    Point p{0.4, x, 0.0, -0.3, 0.2, 0.1};
    STensorReport a = s_tensor(m.distribution, p), b = s_tensor(paper(), p);
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(a.values[1][1][c], b.values[1][1][c], 1e-9);
  }
}

TEST(Catalog, Globalization) {
  GlobalizationReport r = verify_globalization();
  ASSERT_EQ(r.checks.size(), 5u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " residual " << c.residual;
  EXPECT_LT(r.checks[0].residual, 1e-10);
  EXPECT_LT(r.checks[1].residual, 1e-9);
  EXPECT_LT(r.checks[2].residual, 1e-9);
}

TEST(Catalog, GlobalModelFarOut) {
  CatalogModel g = load_model("global_xi");
  for (double x : {-1000.0, -500.0, 500.0, 1000.0}) EXPECT_EQ(classify_point(g.distribution, at_x2(x)).kind, Kind::Elliptic);
}

TEST(Checklist, InjectedSignErrorCaught) {
  ChecklistOptions opt;
  opt.pipeline.negate_jq = true;
  auto items = run_checklist(opt);
  EXPECT_FALSE(find(items, "ce-conditions").passed);
  EXPECT_TRUE(find(items, "fatness-region").passed);
}

TEST(Checklist, ExtraKappa) {
  ChecklistOptions opt;
  opt.extra_kappa = {"y1^2"};
  auto items = run_checklist(opt);
  ASSERT_EQ(items.size(), 13u);
  EXPECT_TRUE(find(items, "kappa-family").passed);
  EXPECT_TRUE(find(items, "reeb-directions").passed);
}

TEST(Dsl, SampleFiles) {
  Distribution d = build_model(parse_model_spec(data_file("semi_global.dist")));
  EXPECT_TRUE(d.has_reeb());
  EXPECT_DOUBLE_EQ(d.domain().lo[0], -2.0);
  for (double x : {0.0, 0.5, 1.5}) EXPECT_EQ(classify_point(d, at_x2(x)).kind, classify_point(paper(), at_x2(x)).kind);
  Distribution f = build_model(parse_model_spec(data_file("flat_elliptic.dist")));
  EXPECT_EQ(classify_point(f, Point{}).kind, Kind::Elliptic);
  EXPECT_LT(s_tensor(f, Point{0.1, 0.2, 0.3, -0.1, 0, 0}).frobenius_norm, 1e-10);
  Distribution h = build_model(parse_model_spec(data_file("flat_hyperbolic.dist")));
  EXPECT_EQ(classify_point(h, Point{}).kind, Kind::Hyperbolic);
}

TEST(Dsl, Defaults) {
  ModelSpec s = parse_model_spec("[forms]\nlambda1 = dz1 - y1*dx1\nlambda2 = dz2 - y2*dx2\n");
  EXPECT_FALSE(s.framing.has_value());
  EXPECT_FALSE(s.reeb.has_value());
  EXPECT_DOUBLE_EQ(s.domain.hi[5], 1.0);
  EXPECT_FALSE(build_model(s).has_reeb());
}

TEST(Dsl, ErrorsCarryLine) {
  struct Case {
    const char* text;
    int line;
    const char* fragment;
  } cases[] = {
      {"[forms]\nlambda1 = dz1 +\n", 2, "lambda1"},
      {"[forms]\nlambda1 = dz1\nlambda1 = dz2\n", 3, "duplicate key"},
      {"[shapes]\n", 1, "unknown section"},
      {"lambda1 = dz1\n", 1, "before the first section"},
      {"[coordinates]\nx1 x2 y1 y2 z2 z1\n", 2, "coordinates must be"},
      {"[forms]\nlambda1 = dz1\n", 2, "missing lambda2"},
      {"[forms]\nlambda1 = dz1\nlambda2 = dz2\n[domain]\nx7 = 0:1\n", 5, "unknown coordinate"},
      {"[forms]\nlambda1 = dz1\nlambda2 = dz2\n[domain]\nx1 = 1:0\n", 5, "empty domain"},
      {"[forms]\nlambda1 = dz1\nlambda2 = dz2\n[domain]\nx1 = a:1\n", 5, "not a number"},
      {"[forms]\nlambda1 = dz1\nlambda2 = dz2\n[framing]\nX1 = d/dx1\n", 5, "X1..X4"},
      {"[forms]\nlambda1 = dz1\nlambda2 = dz2\n[reeb]\nZ3 = d/dz1\n", 5, "unexpected key"},
  };
  for (const auto& c : cases) {
    try {
      parse_model_spec(c.text);
      ADD_FAILURE() << "no error for: " << c.text;
    } catch (const DslError& e) {
      EXPECT_EQ(e.line(), c.line) << c.text;
      EXPECT_NE(std::string(e.what()).find(c.fragment), std::string::npos) << e.what();
    }
  }
}

TEST(Dsl, BadReebPairRejected) {
  std::string text = "[forms]\nlambda1 = dz1 - y1*dx1\nlambda2 = dz2 - y2*dx2\n[reeb]\nZ1 = d/dx1\nZ2 = d/dz2\n";
  EXPECT_THROW(build_model(parse_model_spec(text)), ModelVerificationError);
}

TEST(Report, FloatFormatting) {
  Json j;
  j["a"] = 0.1;
  j["b"] = -0.0;
  j["c"] = std::nan("");
  j["d"] = Json::array({1.5, 2});
  EXPECT_EQ(to_compact_json(j), R"({"a":1.000000000000e-01,"b":0.000000000000e+00,"c":null,"d":[1.500000000000e+00,2]})");
  EXPECT_EQ(to_json_string(Json::object()), "{}\n");
}

TEST(Report, Schema) {
  Report r;
  r.command = "classify";
  r.model = "paper_D";
  r.items.push_back({"x", true, 1e-3, "claim", "detail"});
  r.items.push_back({"y", false, std::nan(""), "", ""});
  Json j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "model", "seed", "items", "points"}));
  EXPECT_EQ(j["seed"], 0x5EED);
  EXPECT_EQ(j["items"][1]["status"], "fail");
  EXPECT_TRUE(r.failed());
  std::string text = render_text(r);
  EXPECT_NE(text.find("[PASS] x  residual=1.000e-03  (claim)  detail"), std::string::npos);
  EXPECT_NE(text.find("[FAIL] y  residual=n/a"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 7), "FAILED\n");
}
