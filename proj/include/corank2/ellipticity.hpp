#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "corank2/distribution.hpp"

namespace corank2 {

/// Symmetric 2×2 matrix of q_D with respect to a volume form on D.
struct QdMatrix {
  Expr m11, m12, m22;

  Matrix<double, 2, 2> at(const Point& p) const {
    auto v = ExprTape({m11, m12, m22}).evaluate<double>(p);
    Matrix<double, 2, 2> m;
    m(0, 0) = v[0].re;
    m(0, 1) = m(1, 0) = v[1].re;
    m(1, 1) = v[2].re;
    return m;
  }
  Expr det() const { return m11 * m22 - m12 * m12; }
};

/// q_D against the framing's dual volume (the default orientation).
inline QdMatrix qd_matrix(const Distribution& d) {
  const auto& q = d.qd_entries();
  return {q[0], q[1], q[2]};
}

/// q_D against an explicit volume 4-form; the volume must not vanish on the framing.
inline QdMatrix qd_matrix(const Distribution& d, const Form& volume, int samples = 16,
                          std::uint64_t seed = kDefaultSeed) {
  if (volume.degree() != 4) throw DegreeError("volume must be a 4-form");
  Expr vol = evaluate_on(volume, std::span<const VectorField>(d.framing()));
  for_each_regular_sample(ExprTape({vol}), d.domain(), samples, SampledOptions{seed, 200, EvalMode::Real},
                          [&](const Point&, const auto& v) {
                            if (magnitude(v[0]) <= 1e-12) throw DistributionError("volume form vanishes on D at a sample point");
                          });
  const auto& q = d.qd_entries();
  return {q[0] / vol, q[1] / vol, q[2] / vol};
}

enum class Kind { Elliptic, Hyperbolic, Degenerate };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Elliptic: return "elliptic";
    case Kind::Hyperbolic: return "hyperbolic";
    default: return "degenerate";
  }
}

struct Classification {
  Kind kind = Kind::Degenerate;
  double det = 0.0;
  double trace = 0.0;
  int definiteness_sign = 0;  // +1 positive, −1 negative definite; 0 unless elliptic
  Matrix<double, 2, 2> m;
};

inline constexpr double kDegeneracyTol = 1e-9;

/// Classification of a numeric q_D matrix; the degeneracy band is tol·‖M‖_F².
inline Classification classify_matrix(const Matrix<double, 2, 2>& m, double tol = kDegeneracyTol) {
  Classification c;
  c.m = m;
  c.det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  c.trace = m(0, 0) + m(1, 1);
  double scale = m(0, 0) * m(0, 0) + 2.0 * m(0, 1) * m(0, 1) + m(1, 1) * m(1, 1);
  double band = tol * scale;
  if (c.det > band) {
    c.kind = Kind::Elliptic;
    c.definiteness_sign = c.trace > 0.0 ? 1 : -1;
  } else if (c.det < -band) {
    c.kind = Kind::Hyperbolic;
  } else {
    c.kind = Kind::Degenerate;
  }
  return c;
}

inline Classification classify_point(const Distribution& d, const Point& p, double tol = kDegeneracyTol) {
  return classify_matrix(d.qd_at(p), tol);
}

/// The point lies outside the elliptic region.
class NonEllipticError : public std::runtime_error {
 public:
  explicit NonEllipticError(const Classification& c)
      : std::runtime_error(message(c)), classification_(c) {}
  const Classification& classification() const { return classification_; }

 private:
  static std::string message(const Classification& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "non-elliptic: det=%.12g (%s)", c.det, kind_name(c.kind));
    return buf;
  }
  Classification classification_;
};

struct GridSpec {
  Coordinate var = Coordinate::x2;
  double lo = 0.0, hi = 0.0;
  int n = 2;
  Point base{};

  Point point(int i) const {
    Point p = base;
    p[index_of(var)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return p;
  }
};

struct RegionCell {
  Point point;
  Classification classification;
};

struct RegionReport {
  GridSpec grid;
  std::vector<RegionCell> cells;
  std::vector<std::size_t> transitions;  // i such that cells i and i+1 are classified differently
  std::vector<std::size_t> degenerate;   // cells with |det| inside the tolerance band
  std::array<int, 3> counts{};           // elliptic, hyperbolic, degenerate
};

/// Classifies every grid point along one coordinate line.
inline RegionReport scan_region(const Distribution& d, const GridSpec& grid, double tol = kDegeneracyTol) {
  if (grid.n < 1) throw std::invalid_argument("grid needs at least one point");
  RegionReport rep;
  rep.grid = grid;
  for (int i = 0; i < grid.n; ++i) {
    Point p = grid.point(i);
    try {
      rep.cells.push_back({p, classify_point(d, p, tol)});
    } catch (const SingularEvaluation& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " at grid cell %d (%s=%.12g)", i, kCoordinateNames[index_of(grid.var)].data(),
                    p[index_of(grid.var)]);
      throw SingularEvaluation(std::string("classification failed") + buf, e.subexpression());
    }
    ++rep.counts[static_cast<int>(rep.cells.back().classification.kind)];
  }
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    if (rep.cells[i].classification.kind == Kind::Degenerate) rep.degenerate.push_back(i);
    if (i + 1 < rep.cells.size() && rep.cells[i].classification.kind != rep.cells[i + 1].classification.kind)
      rep.transitions.push_back(i);
  }
  return rep;
}

}  // namespace corank2
