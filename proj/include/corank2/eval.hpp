#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "corank2/complex.hpp"
#include "corank2/expr.hpp"
#include "corank2/sampling.hpp"

namespace corank2 {

/// Evaluation hit a point where an expression is undefined.
class SingularEvaluation : public std::runtime_error {
 public:
  SingularEvaluation(const std::string& what, std::string subexpression)
      : std::runtime_error(what + ": " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Real mode rejects sqrt of a negative real; Complex mode takes the principal branch.
enum class EvalMode { Real, Complex };

namespace detail {
inline std::string describe(const Expr& e) {
  std::string s = to_string(e);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}
}  // namespace detail

/// A batch of expressions flattened into one instruction list; shared
/// subexpressions are evaluated once.
class ExprTape {
 public:
  ExprTape() = default;
  explicit ExprTape(const std::vector<Expr>& roots) {
    std::unordered_map<const detail::Node*, std::uint32_t> slot;
    for (const Expr& r : roots) outputs_.push_back(compile(r.node(), slot));
  }

  std::size_t size() const { return outputs_.size(); }

  template <class T>
  std::vector<Complex<T>> evaluate(const Coords<T>& p, EvalMode mode = EvalMode::Real) const {
    std::vector<Complex<T>> reg(instr_.size());
    for (std::size_t k = 0; k < instr_.size(); ++k) reg[k] = step<T>(instr_[k], reg, p, mode);
    std::vector<Complex<T>> out;
    out.reserve(outputs_.size());
    for (std::uint32_t o : outputs_) out.push_back(reg[o]);
    return out;
  }

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0, b = 0;
    int index = 0;
    std::complex<double> value{};
    Expr::NodePtr source;  // kept for error messages
  };

  std::uint32_t compile(const Expr::NodePtr& n, std::unordered_map<const detail::Node*, std::uint32_t>& slot) {
    if (auto it = slot.find(n.get()); it != slot.end()) return it->second;
    Instr ins;
    ins.op = n->op;
    ins.index = n->index;
    ins.value = n->value;
    ins.source = n;
    if (n->a) ins.a = compile(n->a, slot);
    if (n->b) ins.b = compile(n->b, slot);
    auto id = static_cast<std::uint32_t>(instr_.size());
    instr_.push_back(std::move(ins));
    slot.emplace(n.get(), id);
    return id;
  }

  template <class T>
  static bool real_valued(const Complex<T>& z) { return is_exact_zero(z.im); }

  template <class T>
  static Complex<T> step(const Instr& ins, const std::vector<Complex<T>>& reg, const Coords<T>& p, EvalMode mode) {
    using std::atan;
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    using std::tan;
    const Complex<T>& a = reg[ins.a];
    switch (ins.op) {
      case Op::Const: return Complex<T>(ins.value);
      case Op::Var: return Complex<T>(p[ins.index]);
      case Op::Add: return a + reg[ins.b];
      case Op::Mul: return a * reg[ins.b];
      case Op::Neg: return -a;
      case Op::Div: {
        const Complex<T>& b = reg[ins.b];
        if (value_of(b.re) == 0.0 && value_of(b.im) == 0.0)
          throw SingularEvaluation("division by zero", detail::describe(Expr::from_node(ins.source)));
        return a / b;
      }
      case Op::Pow: {
        if (ins.index < 0 && value_of(a.re) == 0.0 && value_of(a.im) == 0.0)
          throw SingularEvaluation("negative power of zero", detail::describe(Expr::from_node(ins.source)));
        return ipow(a, ins.index);
      }
      case Op::Sqrt: {
        if (real_valued(a)) {
          if (value_of(a.re) >= 0.0) return Complex<T>(sqrt(a.re));
          if (mode == EvalMode::Real)
            throw SingularEvaluation("sqrt of negative real", detail::describe(Expr::from_node(ins.source)));
        }
        return cmath::sqrt(a);
      }
      case Op::Atan:
        if (real_valued(a)) return Complex<T>(atan(a.re));
        if (value_of(a.re) == 0.0 && std::abs(value_of(a.im)) == 1.0)
          throw SingularEvaluation("atan pole", detail::describe(Expr::from_node(ins.source)));
        return cmath::atan(a);
      case Op::Tan:
        if (real_valued(a)) return Complex<T>(tan(a.re));
        return cmath::tan(a);
      case Op::Sin:
        if (real_valued(a)) return Complex<T>(sin(a.re));
        return cmath::sin(a);
      case Op::Cos:
        if (real_valued(a)) return Complex<T>(cos(a.re));
        return cmath::cos(a);
      case Op::Exp:
        if (real_valued(a)) return Complex<T>(exp(a.re));
        return cmath::exp(a);
    }
    return {};
  }

  std::vector<Instr> instr_;
  std::vector<std::uint32_t> outputs_;
};

namespace detail {
inline bool finite(std::complex<double> z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
}  // namespace detail

/// Evaluates e at p; the result is checked to be finite.
inline std::complex<double> eval(const Expr& e, const Point& p, EvalMode mode = EvalMode::Real) {
  std::complex<double> v = value_of(ExprTape({e}).evaluate<double>(p, mode)[0]);
  if (!detail::finite(v)) throw SingularEvaluation("non-finite value", detail::describe(e));
  return v;
}

/// Real part of eval, for expressions known to be real.
inline double eval_real(const Expr& e, const Point& p) { return eval(e, p).real(); }

/// Evaluation at a generic scalar type (double or Dual).
template <class T>
Complex<T> eval_at(const Expr& e, const Coords<T>& p, EvalMode mode = EvalMode::Real) {
  return ExprTape({e}).evaluate<T>(p, mode)[0];
}

struct SampledOptions {
  std::uint64_t seed = kDefaultSeed;
  int retry_budget = 100;
  EvalMode mode = EvalMode::Real;
};

/// Visits n quasi-random points of the box at which every expression of the
/// tape evaluates finitely; singular points are skipped within a retry budget.
template <class F>
void for_each_regular_sample(const ExprTape& tape, const Box& domain, int n, const SampledOptions& opt, F&& visit) {
  QuasiRandomSampler sampler(domain, opt.seed);
  int retries = 0;
  std::string last_error;
  for (int taken = 0; taken < n;) {
    Point p = sampler.next();
    std::vector<Complex<double>> vals;
    bool ok = true;
    try {
      vals = tape.evaluate<double>(p, opt.mode);
      for (const auto& v : vals)
        if (!detail::finite(value_of(v))) ok = false;
      if (!ok) last_error = "non-finite value";
    } catch (const SingularEvaluation& e) {
      ok = false;
      last_error = e.what();
    }
    if (!ok) {
      if (++retries > opt.retry_budget)
        throw SingularEvaluation("sampling retry budget exhausted", last_error);
      continue;
    }
    visit(p, vals);
    ++taken;
  }
}

/// Project-wide expression equality: |a − b| ≤ tol at n quasi-random points.
inline bool expr_equal_sampled(const Expr& a, const Expr& b, const Box& domain, int n, double tol,
                               const SampledOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("expr_equal_sampled needs n >= 1");
  bool equal = true;
  for_each_regular_sample(ExprTape({a, b}), domain, n, opt, [&](const Point&, const std::vector<Complex<double>>& v) {
    if (std::abs(value_of(v[0]) - value_of(v[1])) > tol) equal = false;
  });
  return equal;
}

/// Largest |a − b| over the samples; companion to expr_equal_sampled for reports.
inline double max_sampled_difference(const Expr& a, const Expr& b, const Box& domain, int n,
                                     const SampledOptions& opt = {}) {
  double worst = 0.0;
  for_each_regular_sample(ExprTape({a, b}), domain, n, opt, [&](const Point&, const std::vector<Complex<double>>& v) {
    worst = std::max(worst, std::abs(value_of(v[0]) - value_of(v[1])));
  });
  return worst;
}

}  // namespace corank2
