#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corank2/linalg.hpp"
#include "corank2/sampling.hpp"

namespace corank2 {

using Json = nlohmann::ordered_json;

struct ReportItem {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  std::string paper_ref;
  std::string detail;  // text format only
};

struct Report {
  std::string command;
  std::string model;
  std::uint64_t seed = kDefaultSeed;
  std::vector<ReportItem> items;
  Json points = Json::array();

  bool failed() const {
    for (const auto& i : items)
      if (!i.passed) return true;
    return false;
  }
};

namespace report_detail {

inline void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
  out += buf;
}

/// Serializer with fixed float formatting; key order is insertion order. indent < 0 is compact.
inline void dump(std::string& out, const Json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += scalars && indent >= 0 ? ", " : ",";
        if (!scalars) newline(depth + 1);
        dump(out, j[i], indent, depth + 1);
      }
      if (!scalars) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: format_double(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace report_detail

inline std::string to_json_string(const Json& j) {
  std::string out;
  report_detail::dump(out, j, 2, 0);
  out += '\n';
  return out;
}

inline std::string to_compact_json(const Json& j) {
  std::string out;
  report_detail::dump(out, j, -1, 0);
  return out;
}

template <std::size_t R, std::size_t C>
Json to_json(const Matrix<double, R, C>& m) {
  Json a = Json::array();
  for (std::size_t r = 0; r < R; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < C; ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

template <std::size_t N>
Json to_json(const Matrix<double, N, 1>& v) {
  Json a = Json::array();
  for (std::size_t r = 0; r < N; ++r) a.push_back(v[r]);
  return a;
}

inline Json to_json(const std::complex<double>& z) { return Json::array({z.real(), z.imag()}); }

inline Json point_json(const Point& p) {
  Json a = Json::array();
  for (double x : p) a.push_back(x);
  return a;
}

inline Json to_json(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["model"] = r.model;
  j["seed"] = r.seed;
  Json items = Json::array();
  for (const auto& i : r.items) {
    Json it;
    it["name"] = i.name;
    it["status"] = i.passed ? "pass" : "fail";
    it["residual"] = i.residual;
    it["paper_ref"] = i.paper_ref;
    items.push_back(it);
  }
  j["items"] = items;
  j["points"] = r.points;
  return j;
}

inline std::string render_json(const Report& r) { return to_json_string(to_json(r)); }

/// One line per item, then one compact line per point.
inline std::string render_text(const Report& r) {
  std::ostringstream os;
  os << r.command << " model=" << r.model << " seed=" << r.seed << '\n';
  for (const auto& i : r.items) {
    char res[32];
    if (std::isfinite(i.residual)) std::snprintf(res, sizeof res, "%.3e", i.residual);
    else std::snprintf(res, sizeof res, "n/a");
    os << (i.passed ? "[PASS] " : "[FAIL] ") << i.name << "  residual=" << res;
    if (!i.paper_ref.empty()) os << "  (" << i.paper_ref << ")";
    if (!i.detail.empty()) os << "  " << i.detail;
    os << '\n';
  }
  for (const auto& p : r.points) os << to_compact_json(p) << '\n';
  if (!r.items.empty()) os << (r.failed() ? "FAILED" : "OK") << '\n';
  return os.str();
}

}  // namespace corank2
