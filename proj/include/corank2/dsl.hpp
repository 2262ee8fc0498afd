#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "corank2/catalog.hpp"
#include "corank2/distribution.hpp"

namespace corank2 {

/// Malformed model file; the message carries the line number.
class DslError : public std::runtime_error {
 public:
  DslError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ModelSpec {
  std::string lambda[2];
  std::optional<std::array<std::string, 4>> framing;
  std::optional<std::array<std::string, 2>> reeb;
  Box domain = Box::cube(1.0);
};

namespace dsl_detail {

inline std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw DslError(line, "not a number: '" + s + "'");
}

}  // namespace dsl_detail

/// Sections: [coordinates], [forms], [framing], [reeb], [domain]; '#' starts a comment.
inline ModelSpec parse_model_spec(const std::string& text) {
  using dsl_detail::trim;
  ModelSpec spec;
  std::map<std::string, std::pair<std::string, int>> forms, framing, reeb;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_section[5] = {};
  static const char* kSections[] = {"coordinates", "forms", "framing", "reeb", "domain"};
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw DslError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (int k = 0; k < 5; ++k)
        if (section == kSections[k]) {
          if (have_section[k]) throw DslError(line, "duplicate section [" + section + "]");
          have_section[k] = known = true;
        }
      if (!known) throw DslError(line, "unknown section [" + section + "]");
      continue;
    }
    if (section.empty()) throw DslError(line, "content before the first section");
    if (section == "coordinates") {
      std::istringstream names(s);
      std::string n;
      int k = 0;
      while (names >> n) {
        if (n.back() == ',') n.pop_back();
        if (k >= kDim || n != kCoordinateNames[k]) throw DslError(line, "coordinates must be x1 x2 y1 y2 z1 z2");
        ++k;
      }
      if (k != kDim) throw DslError(line, "coordinates must be x1 x2 y1 y2 z1 z2");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw DslError(line, "expected 'name = value'");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (value.empty()) throw DslError(line, "empty value for " + key);
    auto put = [&](std::map<std::string, std::pair<std::string, int>>& m, std::initializer_list<const char*> allowed) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw DslError(line, "unexpected key '" + key + "' in [" + section + "]");
      if (m.count(key)) throw DslError(line, "duplicate key '" + key + "'");
      try {
        if (&m == &forms) parse_one_form_coefficients(value);
        else parse_vector_field_coefficients(value);
      } catch (const ParseError& e) {
        throw DslError(line, key + ": " + e.what());
      }
      m[key] = {value, line};
    };
    if (section == "forms") put(forms, {"lambda1", "lambda2"});
    else if (section == "framing") put(framing, {"X1", "X2", "X3", "X4"});
    else if (section == "reeb") put(reeb, {"Z1", "Z2"});
    else {  // domain
      int idx = coordinate_index(key);
      if (idx < 0) throw DslError(line, "unknown coordinate '" + key + "'");
      auto colon = value.find(':');
      if (colon == std::string::npos) throw DslError(line, "domain range must be lo:hi");
      double lo = dsl_detail::number(trim(value.substr(0, colon)), line);
      double hi = dsl_detail::number(trim(value.substr(colon + 1)), line);
      if (!(lo < hi)) throw DslError(line, "empty domain range for " + key);
      spec.domain.lo[idx] = lo;
      spec.domain.hi[idx] = hi;
    }
  }
  for (int i = 0; i < 2; ++i) {
    std::string k = "lambda" + std::to_string(i + 1);
    if (!forms.count(k)) throw DslError(line, "missing " + k + " in [forms]");
    spec.lambda[i] = forms[k].first;
  }
  if (!framing.empty()) {
    if (framing.size() != 4) throw DslError(line, "[framing] needs X1..X4");
    spec.framing.emplace();
    for (int j = 0; j < 4; ++j) (*spec.framing)[j] = framing["X" + std::to_string(j + 1)].first;
  }
  if (!reeb.empty()) {
    if (reeb.size() != 2) throw DslError(line, "[reeb] needs Z1 and Z2");
    spec.reeb = std::array<std::string, 2>{reeb["Z1"].first, reeb["Z2"].first};
  }
  return spec;
}

/// Builds the distribution; a declared Reeb pair is verified before it is attached.
inline Distribution build_model(const ModelSpec& spec, std::uint64_t seed = kDefaultSeed) {
  Form l1 = Form::parse_one_form(spec.lambda[0]);
  Form l2 = Form::parse_one_form(spec.lambda[1]);
  std::optional<Framing> framing;
  if (spec.framing) {
    framing.emplace();
    for (int j = 0; j < 4; ++j) (*framing)[j] = VectorField::parse((*spec.framing)[j]);
  }
  BuildOptions bo;
  bo.seed = seed;
  Distribution d = build_distribution(l1, l2, framing, spec.domain, bo);
  if (!spec.reeb) return d;
  VectorField z1 = VectorField::parse((*spec.reeb)[0]), z2 = VectorField::parse((*spec.reeb)[1]);
  ReebOptions ro;
  ro.samples = 10;
  ro.seed = seed;
  ReebReport rep = verify_reeb(d, z1, z2, ro);
  if (!rep.passed()) {
    std::string failed;
    for (const auto& c : rep.conditions)
      if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name;
    throw ModelVerificationError("declared Reeb pair fails: " + failed);
  }
  return *rep.attached;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace corank2
