#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "corank2/expr.hpp"

namespace corank2 {

template <class T> using Coords = std::array<T, kDim>;
using Point = Coords<double>;

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Axis-aligned coordinate box.
struct Box {
  Point lo{};
  Point hi{};

  static Box cube(double half_width) {
    Box b;
    b.lo.fill(-half_width);
    b.hi.fill(half_width);
    return b;
  }
  Box with(Coordinate c, double lo_v, double hi_v) const {
    Box b = *this;
    b.lo[index_of(c)] = lo_v;
    b.hi[index_of(c)] = hi_v;
    return b;
  }
  Point center() const {
    Point p;
    for (int k = 0; k < kDim; ++k) p[k] = 0.5 * (lo[k] + hi[k]);
    return p;
  }
  bool contains(const Point& p, double margin = 0.0) const {
    for (int k = 0; k < kDim; ++k)
      if (p[k] < lo[k] + margin || p[k] > hi[k] - margin) return false;
    return true;
  }
};

/// Halton low-discrepancy points over a box, randomly shifted modulo 1
/// (Cranley-Patterson) so that the seed selects the point set.
class QuasiRandomSampler {
 public:
  explicit QuasiRandomSampler(const Box& box, std::uint64_t seed = kDefaultSeed) : box_(box) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& s : shift_) s = u(rng);
  }

  Point next() {
    static constexpr std::array<unsigned, kDim> kBases = {2, 3, 5, 7, 11, 13};
    ++index_;
    Point p;
    for (int k = 0; k < kDim; ++k) {
      double h = radical_inverse(index_, kBases[k]) + shift_[k];
      if (h >= 1.0) h -= 1.0;
      p[k] = box_.lo[k] + h * (box_.hi[k] - box_.lo[k]);
    }
    return p;
  }

 private:
  static double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
      r += static_cast<double>(i % base) * f;
      i /= base;
      f *= inv;
    }
    return r;
  }

  Box box_;
  std::array<double, kDim> shift_{};
  std::uint64_t index_ = 0;
};

}  // namespace corank2
