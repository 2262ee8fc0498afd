#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

namespace corank2 {

/// Coordinate index in the fixed ordering (x1, x2, y1, y2, z1, z2).
enum class Coordinate : std::uint8_t { x1 = 0, x2, y1, y2, z1, z2 };

inline constexpr int kDim = 6;
inline constexpr std::array<std::string_view, kDim> kCoordinateNames = {"x1", "x2", "y1", "y2", "z1", "z2"};

inline constexpr int index_of(Coordinate c) { return static_cast<int>(c); }

inline Coordinate coordinate_from_index(int i) {
  if (i < 0 || i >= kDim) throw std::out_of_range("coordinate index out of range: " + std::to_string(i));
  return static_cast<Coordinate>(i);
}

inline int coordinate_index(std::string_view name) {
  for (int i = 0; i < kDim; ++i)
    if (kCoordinateNames[i] == name) return i;
  return -1;
}

enum class Op : std::uint8_t { Const, Var, Add, Mul, Neg, Pow, Div, Sqrt, Atan, Tan, Sin, Cos, Exp };

inline bool is_function(Op op) { return op >= Op::Sqrt; }

inline const char* function_name(Op op) {
  switch (op) {
    case Op::Sqrt: return "sqrt";
    case Op::Atan: return "atan";
    case Op::Tan: return "tan";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    default: return "";
  }
}

class Expr;

namespace detail {
struct Node {
  Op op;
  std::complex<double> value{};  // Const
  int index = 0;                  // Var: coordinate, Pow: exponent
  std::shared_ptr<const Node> a, b;
};
}  // namespace detail

/// Immutable scalar expression over the six coordinates; shared DAG of nodes.
class Expr {
 public:
  using NodePtr = std::shared_ptr<const detail::Node>;

  Expr() : Expr(constant(0.0)) {}
  Expr(double c) : Expr(constant(c)) {}
  Expr(std::complex<double> c) : Expr(constant(c)) {}

  static Expr constant(std::complex<double> c) {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Const;
    n->value = c;
    return Expr(std::move(n));
  }
  static Expr var(Coordinate c) {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Var;
    n->index = index_of(c);
    return Expr(std::move(n));
  }
  static Expr var(int i) { return var(coordinate_from_index(i)); }

  Op op() const { return node_->op; }
  const NodePtr& node() const { return node_; }
  bool is_const() const { return node_->op == Op::Const; }
  std::complex<double> const_value() const { return node_->value; }
  bool is_zero() const { return is_const() && node_->value == std::complex<double>(0.0, 0.0); }
  bool is_one() const { return is_const() && node_->value == std::complex<double>(1.0, 0.0); }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }
  int index() const { return node_->index; }

  static Expr from_node(NodePtr n) { return Expr(std::move(n)); }

 private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
};

namespace detail {
inline Expr make(Op op, const Expr& a, const Expr& b = Expr(), int index = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a.node();
  if (op == Op::Add || op == Op::Mul || op == Op::Div) n->b = b.node();
  n->index = index;
  return Expr::from_node(std::move(n));
}

inline std::complex<double> cpow(std::complex<double> z, int n) {
  std::complex<double> r(1.0, 0.0);
  bool inv = n < 0;
  unsigned m = inv ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
  while (m) {
    if (m & 1u) r *= z;
    z *= z;
    m >>= 1;
  }
  return inv ? 1.0 / r : r;
}
}  // namespace detail

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_const() && b.is_const()) return Expr::constant(a.const_value() + b.const_value());
  return detail::make(Op::Add, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr::constant(-a.const_value());
  if (a.op() == Op::Neg) return a.lhs();
  return detail::make(Op::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.is_const() && b.is_const()) return Expr::constant(a.const_value() - b.const_value());
  return detail::make(Op::Add, a, -b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_const() && b.is_const()) return Expr::constant(a.const_value() * b.const_value());
  if (a.is_const() && a.const_value() == std::complex<double>(-1.0, 0.0)) return -b;
  if (b.is_const() && b.const_value() == std::complex<double>(-1.0, 0.0)) return -a;
  return detail::make(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero constant");
  if (a.is_zero()) return Expr(0.0);
  if (b.is_one()) return a;
  if (a.is_const() && b.is_const()) return Expr::constant(a.const_value() / b.const_value());
  return detail::make(Op::Div, a, b);
}

inline Expr pow(const Expr& a, int n) {
  if (n == 0) return Expr(1.0);
  if (n == 1) return a;
  if (a.is_const()) return Expr::constant(detail::cpow(a.const_value(), n));
  return detail::make(Op::Pow, a, Expr(), n);
}

inline Expr apply(Op fn, const Expr& a) { return detail::make(fn, a); }
inline Expr sqrt(const Expr& a) { return apply(Op::Sqrt, a); }
inline Expr atan(const Expr& a) { return apply(Op::Atan, a); }
inline Expr tan(const Expr& a) { return apply(Op::Tan, a); }
inline Expr sin(const Expr& a) { return apply(Op::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Op::Cos, a); }
inline Expr exp(const Expr& a) { return apply(Op::Exp, a); }

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr var(Coordinate c) { return Expr::var(c); }
inline const Expr& imag_unit() {
  static const Expr i = Expr::constant({0.0, 1.0});
  return i;
}
inline constexpr double kPi = 3.14159265358979323846;

/// Exact derivative with respect to coordinate v.
inline Expr differentiate(const Expr& e, Coordinate v) {
  std::unordered_map<const detail::Node*, Expr> memo;
  const int vi = index_of(v);
  auto rec = [&](auto&& self, const Expr& x) -> Expr {
    auto it = memo.find(x.node().get());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.op()) {
      case Op::Const: r = Expr(0.0); break;
      case Op::Var: r = Expr(x.index() == vi ? 1.0 : 0.0); break;
      case Op::Add: r = self(self, x.lhs()) + self(self, x.rhs()); break;
      case Op::Neg: r = -self(self, x.lhs()); break;
      case Op::Mul: {
        const Expr a = x.lhs(), b = x.rhs();
        r = self(self, a) * b + a * self(self, b);
        break;
      }
      case Op::Div: {
        const Expr a = x.lhs(), b = x.rhs();
        Expr da = self(self, a), db = self(self, b);
        r = da / b - (a * db) / pow(b, 2);
        break;
      }
      case Op::Pow: {
        const Expr a = x.lhs();
        const int n = x.index();
        r = Expr(static_cast<double>(n)) * pow(a, n - 1) * self(self, a);
        break;
      }
      case Op::Sqrt: r = self(self, x.lhs()) / (Expr(2.0) * x); break;
      case Op::Atan: r = self(self, x.lhs()) / (Expr(1.0) + pow(x.lhs(), 2)); break;
      case Op::Tan: r = (Expr(1.0) + pow(x, 2)) * self(self, x.lhs()); break;
      case Op::Sin: r = cos(x.lhs()) * self(self, x.lhs()); break;
      case Op::Cos: r = -(sin(x.lhs()) * self(self, x.lhs())); break;
      case Op::Exp: r = x * self(self, x.lhs()); break;
    }
    memo.emplace(x.node().get(), r);
    return r;
  };
  return rec(rec, e);
}

/// Replaces every coordinate by the corresponding expression.
inline Expr substitute(const Expr& e, const std::array<Expr, kDim>& images) {
  std::unordered_map<const detail::Node*, Expr> memo;
  auto rec = [&](auto&& self, const Expr& x) -> Expr {
    auto it = memo.find(x.node().get());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.op()) {
      case Op::Const: r = x; break;
      case Op::Var: r = images[x.index()]; break;
      case Op::Add: r = self(self, x.lhs()) + self(self, x.rhs()); break;
      case Op::Neg: r = -self(self, x.lhs()); break;
      case Op::Mul: r = self(self, x.lhs()) * self(self, x.rhs()); break;
      case Op::Div: r = self(self, x.lhs()) / self(self, x.rhs()); break;
      case Op::Pow: r = pow(self(self, x.lhs()), x.index()); break;
      default: r = apply(x.op(), self(self, x.lhs())); break;
    }
    memo.emplace(x.node().get(), r);
    return r;
  };
  return rec(rec, e);
}

/// Bitmask of coordinates occurring in e.
inline unsigned variables(const Expr& e) {
  std::unordered_map<const detail::Node*, unsigned> memo;
  auto rec = [&](auto&& self, const detail::Node* n) -> unsigned {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    unsigned m = 0;
    if (n->op == Op::Var) m = 1u << n->index;
    if (n->a) m |= self(self, n->a.get());
    if (n->b) m |= self(self, n->b.get());
    memo.emplace(n, m);
    return m;
  };
  return rec(rec, e.node().get());
}

namespace detail {
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
inline std::string format_const(std::complex<double> c) {
  if (c.imag() == 0.0) {
    std::string s = format_real(c.real());
    return c.real() < 0.0 || std::signbit(c.real()) ? "(" + s + ")" : s;
  }
  std::string im = format_real(std::abs(c.imag())) + "i";
  if (c.real() == 0.0) return c.imag() < 0.0 ? "(-" + im + ")" : im;
  return "(" + format_real(c.real()) + (c.imag() < 0.0 ? " - " : " + ") + im + ")";
}
}  // namespace detail

/// Fully parenthesized text that parse_expr reads back to an equal expression.
inline std::string to_string(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return detail::format_const(e.const_value());
    case Op::Var: return std::string(kCoordinateNames[e.index()]);
    case Op::Add: return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
    case Op::Mul: return "(" + to_string(e.lhs()) + "*" + to_string(e.rhs()) + ")";
    case Op::Div: return "(" + to_string(e.lhs()) + "/" + to_string(e.rhs()) + ")";
    case Op::Neg: return "(-" + to_string(e.lhs()) + ")";
    case Op::Pow: {
      std::string base = to_string(e.lhs());
      if (e.index() < 0) return "(" + base + "^(" + std::to_string(e.index()) + "))";
      return "(" + base + "^" + std::to_string(e.index()) + ")";
    }
    default: return std::string(function_name(e.op())) + "(" + to_string(e.lhs()) + ")";
  }
}

}  // namespace corank2
