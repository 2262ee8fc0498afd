#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corank2/cap_eastwood.hpp"
#include "corank2/catalog.hpp"
#include "corank2/checklist.hpp"
#include "corank2/dsl.hpp"
#include "corank2/ellipticity.hpp"
#include "corank2/oracle.hpp"
#include "corank2/report.hpp"

namespace corank2::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kUsage = 2, kEvaluation = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct JobSpec {
  std::string command;
  std::string model_name;
  std::string file;
  std::string kappa;
  std::vector<std::string> points;
  std::string grid;
  double tol = kDegeneracyTol;
  std::string seed_text;
  std::string format;
  std::string output;
};

struct LoadedModel {
  std::string label;
  Distribution distribution;
  bool paper_family = false;  // the closed forms in x2 apply
};

inline Point parse_point(const std::string& s) {
  Point p{};
  std::stringstream ss(s);
  std::string tok;
  int k = 0;
  while (std::getline(ss, tok, ',')) {
    if (k >= kDim) throw UsageError("--point needs 6 comma-separated numbers: " + s);
    try {
      std::size_t used = 0;
      p[k] = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + tok + "' in --point");
    }
    ++k;
  }
  if (k != kDim) throw UsageError("--point needs 6 comma-separated numbers: " + s);
  return p;
}

/// var=lo:hi:n
inline GridSpec parse_grid(const std::string& s, const Point& base) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw UsageError("--grid must be var=lo:hi:n");
  int idx = coordinate_index(s.substr(0, eq));
  if (idx < 0) throw UsageError("unknown grid variable: " + s.substr(0, eq));
  std::stringstream ss(s.substr(eq + 1));
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) )
    throw UsageError("--grid must be var=lo:hi:n");
  GridSpec g;
  g.var = coordinate_from_index(idx);
  g.base = base;
  try {
    g.lo = std::stod(a);
    g.hi = std::stod(b);
    std::size_t used = 0;
    g.n = std::stoi(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::exception&) {
    throw UsageError("--grid must be var=lo:hi:n");
  }
  if (g.n < 1 || !(g.lo <= g.hi)) throw UsageError("--grid needs n >= 1 and lo <= hi");
  return g;
}

inline std::uint64_t parse_seed(const std::string& s) {
  if (s.empty()) return kDefaultSeed;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used, 0);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("bad --seed: " + s);
}

inline LoadedModel load(const JobSpec& job, std::uint64_t seed) {
  bool has_model = !job.model_name.empty(), has_file = !job.file.empty();
  if (has_model == has_file) throw UsageError("give exactly one of --model or --file");
  if (has_file) {
    if (!job.kappa.empty()) throw UsageError("--kappa applies to --model h_kappa only");
    ModelSpec spec = parse_model_spec(read_file(job.file));
    return {job.file, build_model(spec, seed), false};
  }
  std::optional<std::string> kappa;
  if (!job.kappa.empty()) kappa = job.kappa;
  CatalogModel m = load_model(job.model_name, kappa);
  std::string label = m.name + (kappa ? "(kappa=" + *kappa + ")" : "");
  return {label, m.distribution, m.name == "paper_D" || m.name == "h_kappa"};
}

inline std::vector<Point> job_points(const JobSpec& job, const Distribution& d) {
  std::vector<Point> pts;
  for (const auto& s : job.points) pts.push_back(parse_point(s));
  if (pts.empty()) pts.push_back(d.domain().center());
  return pts;
}

inline ReportItem item(std::string name, bool passed, double residual, std::string claim = {}) {
  return {std::move(name), passed, residual, std::move(claim), {}};
}

inline Json classification_json(const Point& p, const Classification& c) {
  Json j;
  j["point"] = point_json(p);
  j["classification"] = kind_name(c.kind);
  j["det"] = c.det;
  j["trace"] = c.trace;
  j["definiteness"] = c.definiteness_sign;
  j["qd"] = to_json(c.m);
  return j;
}

inline Json complex_row_json(const Matrix<Complex<double>, 1, 4>& r) {
  Json a = Json::array();
  for (int k = 0; k < 4; ++k) a.push_back(Json::array({r(0, k).re, r(0, k).im}));
  return a;
}

inline void run_classify(const JobSpec& job, const LoadedModel& m, Report& rep, std::ostream& out, bool csv) {
  if (job.grid.empty()) {
    for (const Point& p : job_points(job, m.distribution))
      rep.points.push_back(classification_json(p, classify_point(m.distribution, p, job.tol)));
    return;
  }
  Point base = job.points.empty() ? m.distribution.domain().center() : parse_point(job.points.front());
  RegionReport r = scan_region(m.distribution, parse_grid(job.grid, base), job.tol);
  if (csv) {
    int idx = index_of(r.grid.var);
    out << kCoordinateNames[idx] << ",det,classification\n";
    for (const auto& c : r.cells) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%s\n", c.point[idx], c.classification.det,
                    kind_name(c.classification.kind));
      out << buf;
    }
    return;
  }
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    Json j = classification_json(r.cells[i].point, r.cells[i].classification);
    j.erase("qd");
    rep.points.push_back(j);
  }
  Json summary;
  summary["grid"] = {{"var", kCoordinateNames[index_of(r.grid.var)]}, {"lo", r.grid.lo}, {"hi", r.grid.hi}, {"n", r.grid.n}};
  summary["counts"] = {{"elliptic", r.counts[0]}, {"hyperbolic", r.counts[1]}, {"degenerate", r.counts[2]}};
  Json tr = Json::array();
  for (std::size_t i : r.transitions) tr.push_back(Json::array({r.cells[i].point[index_of(r.grid.var)], r.cells[i + 1].point[index_of(r.grid.var)]}));
  summary["transitions"] = tr;
  rep.points.push_back({{"region", summary}});
}

inline void run_reeb(const JobSpec&, const LoadedModel& m, Report& rep, std::uint64_t seed) {
  if (!m.distribution.has_reeb()) throw DistributionError("model declares no Reeb pair");
  ReebOptions ro;
  ro.seed = seed;
  const ReebPair& r = *m.distribution.reeb();
  ReebReport rr = verify_reeb(m.distribution, r.z1, r.z2, ro);
  for (const auto& c : rr.conditions) rep.items.push_back(item(c.name, c.passed, c.residual, "Reeb directions"));
}

inline void run_j_structure(const JobSpec& job, const LoadedModel& m, Report& rep, const PipelineOptions& po) {
  double j2 = 0, pres = 0, iii = 0, iv = 0, kres = 0;
  bool orient = true;
  for (const Point& p : job_points(job, m.distribution)) {
    ComplexStructureData cs = canonical_J(m.distribution, p, po);
    ConditionResiduals cr = check_conditions(m.distribution, p, po);
    Json j;
    j["point"] = point_json(p);
    j["t"] = to_json(cs.root.t);
    j["conjugated"] = cs.conjugated;
    j["J_D"] = to_json(cs.j_D);
    j["J_Q"] = to_json(cs.j_Q);
    j["J_tilde"] = to_json(cs.j_tilde);
    j["K"] = to_json(cs.K);
    j["J"] = to_json(cs.j_full);
    j["k_residual"] = cs.k_residual;
    j["orientation"] = cs.orientation;
    rep.points.push_back(j);
    j2 = std::max(j2, cr.j_squared);
    pres = std::max(pres, cr.preserves_D);
    iii = std::max(iii, cr.bilinear);
    iv = std::max(iv, cr.mixed);
    kres = std::max(kres, cs.k_residual);
    orient = orient && cr.orientation == 1;
  }
  rep.items.push_back(item("J^2 = -Id", j2 <= 1e-9, j2, "almost complex structure"));
  rep.items.push_back(item("J preserves D", pres <= 1e-9, pres, "condition i"));
  rep.items.push_back(item("J induces the orientation", orient, orient ? 0.0 : 1.0, "condition ii"));
  rep.items.push_back(item("Levi map complex bilinear", iii < 1e-7, iii, "condition iii"));
  rep.items.push_back(item("mixed bracket condition", iv < 1e-6, iv, "condition iv"));
  rep.items.push_back(item("K least-squares residual", kres < po.k_residual_tol, kres, "correction K"));
}

inline void run_s_tensor(const JobSpec& job, const LoadedModel& m, Report& rep, const PipelineOptions& po) {
  for (const Point& p : job_points(job, m.distribution)) {
    STensorReport s = s_tensor(m.distribution, p, po);
    double x2 = p[index_of(Coordinate::x2)];
    if (m.paper_family && std::abs(x2) < 1.0) s.closed_form_A1_A2 = a1_a2_closed_form(x2);
    Json j;
    j["point"] = point_json(p);
    Json vals = Json::array();
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 4; ++k)
        vals.push_back({{"u", "Z" + std::to_string(i + 1)}, {"v", "X" + std::to_string(k + 1)}, {"S", to_json(s.values[i][k])}});
    j["values"] = vals;
    j["frobenius_norm"] = s.frobenius_norm;
    if (s.closed_form_A1_A2) j["closed_form_A1_A2"] = {(*s.closed_form_A1_A2)[0], (*s.closed_form_A1_A2)[1]};
    else j["closed_form_A1_A2"] = nullptr;
    rep.points.push_back(j);
  }
}

inline void run_factor(const JobSpec& job, const LoadedModel& m, Report& rep, const PipelineOptions& po) {
  double pl = 0, wr = 0;
  QdMatrix q = qd_matrix(m.distribution);
  for (const Point& p : job_points(job, m.distribution)) {
    if (!m.distribution.has_reeb()) throw DistributionError("model declares no Reeb pair");
    RootData r = find_root(q, p, job.tol);
    Factorization f = factor_dpsi(m.distribution, r, p, po.psi_scale);
    Json j;
    j["point"] = point_json(p);
    j["t"] = to_json(r.t);
    j["discriminant"] = r.discriminant;
    j["alpha"] = complex_row_json(f.alpha);
    j["beta"] = complex_row_json(f.beta);
    j["plucker_residual"] = f.plucker_residual;
    j["wedge_residual"] = f.wedge_residual;
    rep.points.push_back(j);
    pl = std::max(pl, f.plucker_residual);
    wr = std::max(wr, f.wedge_residual);
  }
  rep.items.push_back(item("dpsi|_D simple (Pluecker)", pl < 1e-9, pl, "simple decomposition"));
  rep.items.push_back(item("alpha ^ beta = dpsi|_D", wr < 1e-9, wr, "simple decomposition"));
}

inline void run_globalize(Report& rep, std::uint64_t seed) {
  GlobalizationReport g = verify_globalization(50, seed);
  for (const auto& c : g.checks) rep.items.push_back(item(c.name, c.passed, c.residual, "globalization"));
}

inline void run_verify(const JobSpec& job, Report& rep, std::uint64_t seed) {
  ChecklistOptions co;
  co.seed = seed;
  co.pipeline.tol = job.tol;
  if (!job.kappa.empty()) {
    load_model("h_kappa", job.kappa, false);  // validates the expression
    co.extra_kappa.push_back(job.kappa);
  }
  for (auto& c : run_checklist(co)) {
    ReportItem it = item(c.name, c.passed, c.residual, c.claim);
    it.detail = c.detail;
    rep.items.push_back(it);
  }
}

/// Runs one command line (args exclude the program name). Reports go to out, diagnostics to err.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fat corank-2 distributions: classification, canonical almost complex structure, obstruction S"};
  app.require_subcommand(1);
  JobSpec job;

  struct Sub {
    const char* name;
    const char* help;
    bool needs_model;
  };
  const Sub subs[] = {
      {"classify", "classify q_D at points or along a grid line", true},
      {"reeb-check", "verify the model's Reeb pair", true},
      {"j-structure", "canonical J and its characterizing conditions", true},
      {"s-tensor", "obstruction tensor S(Z_i, X_j)", true},
      {"factor", "root t and decomposition of dpsi|_D", true},
      {"scan", "classification along a grid line as CSV", true},
      {"globalize-check", "globalization map and global model checks", false},
      {"verify-paper", "full verification checklist", false},
  };
  for (const Sub& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->callback([&job, name = std::string(s.name)] { job.command = name; });
    if (s.needs_model) {
      sc->add_option("--model", job.model_name, "catalog model name");
      sc->add_option("--file", job.file, "model description file");
      sc->add_option("--point", job.points, "evaluation point c1,...,c6 (repeatable)")->allow_extra_args(false);
      sc->add_option("--grid", job.grid, "grid line var=lo:hi:n");
    }
    sc->add_option("--kappa", job.kappa, "kappa(y1) for h_kappa");
    sc->add_option("--tol", job.tol, "degeneracy tolerance");
    sc->add_option("--seed", job.seed_text, "seed for sampled checks");
    sc->add_option("--format", job.format, "json | text | csv")->check(CLI::IsMember({"json", "text", "csv"}));
    sc->add_option("--output", job.output, "write the report to this path");
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (!(job.tol > 0.0)) throw UsageError("--tol must be positive");
    std::uint64_t seed = parse_seed(job.seed_text);
    std::string format = job.format.empty() ? (job.command == "scan" ? "csv" : "json") : job.format;
    bool csv = format == "csv";
    if (csv && job.command != "scan" && job.command != "classify")
      throw UsageError("csv output is available for scan and classify --grid only");
    if (job.command == "scan" && job.grid.empty()) throw UsageError("scan needs --grid");
    if (csv && job.grid.empty()) throw UsageError("csv output needs --grid");

    Report rep;
    rep.command = job.command;
    rep.seed = seed;
    PipelineOptions po;
    po.tol = job.tol;
    std::ostringstream body;

    if (job.command == "verify-paper") {
      rep.model = "catalog";
      run_verify(job, rep, seed);
    } else if (job.command == "globalize-check") {
      rep.model = "global_xi";
      if (!job.kappa.empty()) throw UsageError("--kappa does not apply to globalize-check");
      run_globalize(rep, seed);
    } else {
      LoadedModel m = load(job, seed);
      rep.model = m.label;
      if (job.command == "classify" || job.command == "scan") run_classify(job, m, rep, body, csv);
      else if (job.command == "reeb-check") run_reeb(job, m, rep, seed);
      else if (job.command == "j-structure") run_j_structure(job, m, rep, po);
      else if (job.command == "s-tensor") run_s_tensor(job, m, rep, po);
      else if (job.command == "factor") run_factor(job, m, rep, po);
    }

    if (!csv) body << (format == "text" ? render_text(rep) : render_json(rep));
    if (job.output.empty()) {
      out << body.str();
    } else {
      std::ofstream f(job.output, std::ios::binary);
      if (!f) throw UsageError("cannot write " + job.output);
      f << body.str();
    }
    return rep.failed() ? kVerificationFailure : kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const DslError& e) {
    err << "model file error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnknownModel& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ModelVerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const NonEllipticError& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluation;
  } catch (const DistributionError& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluation;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluation;
  }
}

}  // namespace corank2::cli
