#pragma once

#include <cmath>
#include <random>
#include <string>

#include "corank2/catalog.hpp"
#include "corank2/expr.hpp"
#include "corank2/sampling.hpp"

namespace corank2::testing {

inline Point at_x2(double x2) {
  Point p{};
  p[index_of(Coordinate::x2)] = x2;
  return p;
}

inline double delta(double x2) { return std::sqrt(3.0 - 2.0 * x2 * x2 - x2 * x2 * x2 * x2); }

inline const Distribution& paper() {
  static const Distribution d = load_model("paper_D").distribution;
  return d;
}
inline const Distribution& flat() {
  static const Distribution d = load_model("flat_elliptic").distribution;
  return d;
}
inline const Distribution& hyperbolic() {
  static const Distribution d = load_model("flat_hyperbolic").distribution;
  return d;
}

/// Random expression over the grammar, regular on the unit cube: sqrt and
/// division only see arguments bounded away from zero.
class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

  Expr operator()(int depth = 3) {
    if (depth == 0 || pick(4) == 0) return leaf();
    switch (pick(8)) {
      case 0: return (*this)(depth - 1) + (*this)(depth - 1);
      case 1: return (*this)(depth - 1) * (*this)(depth - 1);
      case 2: return -(*this)(depth - 1);
      case 3: return pow((*this)(depth - 1), 1 + pick(3));
      case 4: return (*this)(depth - 1) / (Expr(2.0) + sin((*this)(depth - 1)));
      case 5: return sqrt(Expr(1.5) + cos((*this)(depth - 1)));
      case 6: return atan((*this)(depth - 1));
      default: return pick(2) ? exp(sin((*this)(depth - 1))) : sin((*this)(depth - 1));
    }
  }

  Coordinate coordinate() { return coordinate_from_index(pick(kDim)); }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  Expr leaf() {
    if (pick(3) == 0) return Expr(std::uniform_real_distribution<double>(-2.0, 2.0)(rng_));
    return Expr::var(pick(kDim));
  }
  std::mt19937_64 rng_;
};

}  // namespace corank2::testing
