#pragma once

#include <array>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "corank2/expr.hpp"

namespace corank2 {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

/// Which basis tokens the parser accepts besides plain scalars.
enum class BasisKind { None, Differentials, Derivations };

/// Either a scalar or a linear combination of the six basis elements.
struct Linear {
  Expr scalar;
  std::array<Expr, kDim> coeff{};
  bool has_basis = false;

  static Linear of_scalar(Expr e) { return {std::move(e), {}, false}; }
};

class Parser {
 public:
  Parser(std::string_view text, BasisKind kind) : s_(text), kind_(kind) {}

  Linear parse_all() {
    Linear v = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view s_;
  BasisKind kind_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Linear add(Linear a, const Linear& b, bool subtract, std::size_t at) {
    if (a.has_basis != b.has_basis) {
      bool a_zero = !a.has_basis && a.scalar.is_zero();
      bool b_zero = !b.has_basis && b.scalar.is_zero();
      if (!a_zero && !b_zero) fail_at("cannot add a scalar to a basis combination", at);
      if (a_zero) {
        if (!subtract) return b;
        Linear r = b;
        for (auto& c : r.coeff) c = -c;
        return r;
      }
      return a;
    }
    if (!a.has_basis) {
      a.scalar = subtract ? a.scalar - b.scalar : a.scalar + b.scalar;
      return a;
    }
    for (int k = 0; k < kDim; ++k) a.coeff[k] = subtract ? a.coeff[k] - b.coeff[k] : a.coeff[k] + b.coeff[k];
    return a;
  }

  Linear scale(const Linear& v, const Expr& s) {
    Linear r = v;
    if (!v.has_basis) {
      r.scalar = v.scalar * s;
      return r;
    }
    for (auto& c : r.coeff) c = c * s;
    return r;
  }

  Linear expression() {
    skip_ws();
    Linear v = term();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('+')) v = add(std::move(v), term(), false, at);
      else if (accept('-')) v = add(std::move(v), term(), true, at);
      else return v;
    }
  }

  Linear term() {
    Linear v = unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        Linear w = unary();
        if (v.has_basis && w.has_basis) fail_at("product of two basis combinations", at);
        if (!v.has_basis && !w.has_basis) v.scalar = v.scalar * w.scalar;
        else v = v.has_basis ? scale(v, w.scalar) : scale(w, v.scalar);
      } else if (accept('/')) {
        Linear w = unary();
        if (w.has_basis) fail_at("division by a basis combination", at);
        if (w.scalar.is_zero()) fail_at("division by zero constant", at);
        if (v.has_basis) {
          for (auto& c : v.coeff) c = c / w.scalar;
        } else {
          v.scalar = v.scalar / w.scalar;
        }
      } else {
        return v;
      }
    }
  }

  Linear unary() {
    if (accept('-')) {
      Linear v = unary();
      if (!v.has_basis) return Linear::of_scalar(-v.scalar);
      for (auto& c : v.coeff) c = -c;
      return v;
    }
    if (accept('+')) return unary();
    return power();
  }

  Linear power() {
    Linear base = primary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (!accept('^')) return base;
      if (base.has_basis) fail_at("power of a basis combination", at);
      int n = integer_exponent();
      base.scalar = pow(base.scalar, n);
    }
  }

  int integer_exponent() {
    skip_ws();
    bool paren = accept('(');
    skip_ws();
    bool neg = false;
    if (accept('-')) neg = true;
    else accept('+');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("non-integer exponent");
    int n = std::atoi(std::string(s_.substr(start, pos_ - start)).c_str());
    if (paren) expect(')');
    return neg ? -n : n;
  }

  Linear number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit(s_.substr(start, pos_ - start));
    if (lit == ".") fail_at("syntax error: malformed number", start);
    double x = std::strtod(lit.c_str(), nullptr);
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        !(pos_ + 1 < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
      ++pos_;
      return Linear::of_scalar(Expr::constant({0.0, x}));
    }
    return Linear::of_scalar(Expr(x));
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Linear basis(int k) {
    Linear v;
    v.has_basis = true;
    v.coeff[k] = Expr(1.0);
    return v;
  }

  Linear primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Linear v = expression();
      expect(')');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t at = pos_;
      std::string id = identifier();
      if (int k = coordinate_index(id); k >= 0) return Linear::of_scalar(Expr::var(k));
      if (id == "pi") return Linear::of_scalar(Expr(kPi));
      for (Op fn : {Op::Sqrt, Op::Atan, Op::Tan, Op::Sin, Op::Cos, Op::Exp}) {
        if (id == function_name(fn)) {
          expect('(');
          std::size_t arg_at = pos_;
          Linear arg = expression();
          expect(')');
          if (arg.has_basis) fail_at("function of a basis combination", arg_at);
          return Linear::of_scalar(apply(fn, arg.scalar));
        }
      }
      if (kind_ == BasisKind::Differentials && id.size() == 3 && id[0] == 'd') {
        if (int k = coordinate_index(id.substr(1)); k >= 0) return basis(k);
      }
      if (kind_ == BasisKind::Derivations && id == "d") {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '/') {
          ++pos_;
          skip_ws();
          std::string rest = identifier();
          if (rest.size() == 3 && rest[0] == 'd') {
            if (int k = coordinate_index(rest.substr(1)); k >= 0) return basis(k);
          }
          fail_at("unknown derivation d/" + rest, at);
        }
      }
      fail_at("unknown identifier " + id, at);
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace detail

/// Parses a scalar expression in the coordinate grammar.
inline Expr parse_expr(std::string_view text) {
  detail::Linear v = detail::Parser(text, detail::BasisKind::None).parse_all();
  return v.scalar;
}

/// Parses a 1-form written with differentials dx1..dz2; returns its six coefficients.
inline std::array<Expr, kDim> parse_one_form_coefficients(std::string_view text) {
  detail::Linear v = detail::Parser(text, detail::BasisKind::Differentials).parse_all();
  if (!v.has_basis && !v.scalar.is_zero()) throw ParseError("expected a 1-form, got a scalar", 0);
  return v.coeff;
}

/// Parses a vector field written with derivations d/dx1..d/dz2; returns its six coefficients.
inline std::array<Expr, kDim> parse_vector_field_coefficients(std::string_view text) {
  detail::Linear v = detail::Parser(text, detail::BasisKind::Derivations).parse_all();
  if (!v.has_basis && !v.scalar.is_zero()) throw ParseError("expected a vector field, got a scalar", 0);
  return v.coeff;
}

}  // namespace corank2
