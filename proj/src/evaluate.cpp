#include "nlsym/evaluate.hpp"

#include <cmath>
#include <limits>

namespace nlsym {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;

bool near_real(Complex z) { return std::fabs(z.imag()) <= 1e-12 * (1.0 + std::fabs(z.real())); }

class Evaluator {
public:
  Evaluator(const Bindings& b, EvalOptions o) : at_(b), opt_(o) {}

  Complex run(const Expr& e) {
    Complex v = eval(e);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail("non-finite value", e);
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& what, const Expr& e) const { throw EvalError(what, render(e)); }

  Complex real_guard(Complex v, const Expr& e) const {
    if (!opt_.complex && !near_real(v)) fail("complex value in real evaluation", e);
    return opt_.complex ? v : Complex(v.real(), 0.0);
  }

  Complex power(const Expr& e) {
    const Expr& be = e.children()[0];
    const Expr& xe = e.children()[1];
    Complex b = eval(be);
    if (xe.kind() == Kind::Number) {
      const Rational& q = xe.value();
      if (denominator(q) == 1 && abs(numerator(q)) < 1000000) {
        long n = numerator(q).convert_to<long>();
        if (n < 0 && b == Complex(0.0)) fail("division by zero", e);
        if (b.imag() == 0.0) return Complex(std::pow(b.real(), static_cast<double>(n)), 0.0);
        return std::pow(b, static_cast<double>(n));
      }
      if (!opt_.complex && b.real() < 0 && b.imag() == 0.0) {
        Integer den = denominator(q);
        if (den % 2 == 1) {
          double mag = std::pow(-b.real(), q.convert_to<double>());
          bool odd_num = numerator(q) % 2 != 0;
          return Complex(odd_num ? -mag : mag, 0.0);
        }
        fail("even root of a negative number", e);
      }
      double x = q.convert_to<double>();
      if (b == Complex(0.0)) {
        if (x < 0) fail("division by zero", e);
        return Complex(0.0);
      }
      if (b.imag() == 0.0 && b.real() > 0) return Complex(std::pow(b.real(), x), 0.0);
      return std::pow(b, x);
    }
    Complex x = eval(xe);
    if (b == Complex(0.0)) {
      if (x.real() <= 0) fail("zero to a non-positive power", e);
      return Complex(0.0);
    }
    if (!opt_.complex) {
      if (b.real() < 0) fail("negative base with symbolic exponent", e);
      return Complex(std::pow(b.real(), x.real()), 0.0);
    }
    return std::exp(x * std::log(b));
  }

  Complex apply(const Expr& e) {
    Complex a = eval(e.children()[0]);
    switch (e.fn()) {
      case Fn::Exp: return std::exp(a);
      case Fn::Ln:
        if (a == Complex(0.0)) fail("logarithm of zero", e);
        if (!opt_.complex && a.real() < 0) fail("logarithm of a negative number", e);
        return opt_.complex ? std::log(a) : Complex(std::log(a.real()), 0.0);
      case Fn::Sqrt:
        if (!opt_.complex && a.real() < 0) fail("square root of a negative number", e);
        return opt_.complex ? std::sqrt(a) : Complex(std::sqrt(a.real()), 0.0);
      case Fn::Sin: return std::sin(a);
      case Fn::Cos: return std::cos(a);
      case Fn::Sinh: return std::sinh(a);
      case Fn::Cosh: return std::cosh(a);
      case Fn::Tanh: return std::tanh(a);
      case Fn::LambertW:
        if (!opt_.complex) {
          if (a.real() < -kInvE - 1e-15) fail("lambertW argument below -1/e", e);
          return Complex(lambert_w0(std::max(a.real(), -kInvE)), 0.0);
        }
        return lambert_w0(a);
    }
    return Complex(0.0);
  }

  Complex eval(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number: return Complex(e.value().convert_to<double>(), 0.0);
      case Kind::Float: return Complex(e.float_value(), 0.0);
      case Kind::Imag:
        if (!opt_.complex) fail("imaginary unit in real evaluation", e);
        return Complex(0.0, 1.0);
      case Kind::Symbol: {
        auto it = at_.find(e.name());
        if (it == at_.end()) fail("unbound symbol", e);
        return real_guard(it->second, e);
      }
      case Kind::Sum: {
        Complex s(0.0);
        for (const auto& c : e.children()) s += eval(c);
        return s;
      }
      case Kind::Product: {
        Complex p(1.0);
        for (const auto& c : e.children()) p *= eval(c);
        return p;
      }
      case Kind::Quotient: {
        Complex n = eval(e.children()[0]);
        Complex d = eval(e.children()[1]);
        if (d == Complex(0.0)) fail("division by zero", e);
        return n / d;
      }
      case Kind::Power: return real_guard(power(e), e);
      case Kind::Apply: return real_guard(apply(e), e);
    }
    return Complex(0.0);
  }

  const Bindings& at_;
  EvalOptions opt_;
};

}  // namespace

Complex evaluate(const Expr& e, const Bindings& at, EvalOptions opt) { return Evaluator(at, opt).run(e); }

double evaluate_real(const Expr& e, const Bindings& at) { return evaluate(e, at).real(); }

// ---------------------------------------------------------------- compiled

CompiledExpr::CompiledExpr(const Expr& e, std::vector<std::string> slots, const Bindings& fixed) : slots_(std::move(slots)) {
  emit(e, fixed);
  std::size_t depth = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const:
      case Op::Slot: ++depth; break;
      case Op::Add:
      case Op::Mul: depth -= static_cast<std::size_t>(in.arg - 1); break;
      case Op::Div:
      case Op::Pow: --depth; break;
      default: break;
    }
    depth_ = std::max(depth_, depth);
  }
}

void CompiledExpr::emit(const Expr& e, const Bindings& fixed) {
  switch (e.kind()) {
    case Kind::Number:
      code_.push_back({Op::Const, 0, e.value().convert_to<double>()});
      return;
    case Kind::Float:
      code_.push_back({Op::Const, 0, e.float_value()});
      return;
    case Kind::Imag:
      throw EvalError("imaginary unit in real evaluation", "I");
    case Kind::Symbol: {
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i] == e.name()) {
          code_.push_back({Op::Slot, static_cast<int>(i)});
          return;
        }
      }
      auto it = fixed.find(e.name());
      if (it == fixed.end()) throw EvalError("unbound symbol", e.name());
      if (!near_real(it->second)) throw EvalError("complex binding in real evaluation", e.name());
      code_.push_back({Op::Const, 0, it->second.real()});
      return;
    }
    case Kind::Sum:
    case Kind::Product:
      for (const auto& c : e.children()) emit(c, fixed);
      code_.push_back({e.kind() == Kind::Sum ? Op::Add : Op::Mul, static_cast<int>(e.children().size())});
      return;
    case Kind::Quotient:
      emit(e.children()[0], fixed);
      emit(e.children()[1], fixed);
      code_.push_back({Op::Div});
      return;
    case Kind::Power: {
      const Expr& x = e.children()[1];
      emit(e.children()[0], fixed);
      if (x.kind() == Kind::Number) {
        const Rational& q = x.value();
        if (denominator(q) == 1 && abs(numerator(q)) < 1000000) {
          code_.push_back({Op::PowInt, numerator(q).convert_to<int>()});
          return;
        }
        if (denominator(q) % 2 == 1 && numerator(q) % 2 == 0) {
          code_.push_back({Op::Root, 2, q.convert_to<double>()});
          return;
        }
        code_.push_back({Op::Root, denominator(q) % 2 == 1 ? 1 : 0, q.convert_to<double>()});
        return;
      }
      emit(x, fixed);
      code_.push_back({Op::Pow});
      return;
    }
    case Kind::Apply:
      emit(e.children()[0], fixed);
      code_.push_back({Op::Call, 0, 0.0, e.fn()});
      return;
  }
}

double CompiledExpr::operator()(const double* v) const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  thread_local std::vector<double> stack;
  if (stack.size() < depth_ + 1) stack.resize(depth_ + 1);
  double* s = stack.data();
  std::size_t sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: s[sp++] = in.val; break;
      case Op::Slot: s[sp++] = v[in.arg]; break;
      case Op::Add: {
        double acc = 0;
        for (int i = 0; i < in.arg; ++i) acc += s[--sp];
        s[sp++] = acc;
        break;
      }
      case Op::Mul: {
        double acc = 1;
        for (int i = 0; i < in.arg; ++i) acc *= s[--sp];
        s[sp++] = acc;
        break;
      }
      case Op::Div: {
        double d = s[--sp];
        if (d == 0.0) return nan;
        s[sp - 1] /= d;
        break;
      }
      case Op::Pow: {
        double x = s[--sp];
        double b = s[sp - 1];
        if (b < 0) return nan;
        s[sp - 1] = std::pow(b, x);
        break;
      }
      case Op::PowInt: {
        double b = s[sp - 1];
        if (in.arg < 0 && b == 0.0) return nan;
        s[sp - 1] = std::pow(b, in.arg);
        break;
      }
      case Op::Root: {
        // arg: 0 even root, 1 odd root with odd numerator, 2 odd root with even numerator
        double b = s[sp - 1];
        if (b < 0) {
          if (in.arg == 0) return nan;
          double m = std::pow(-b, in.val);
          s[sp - 1] = in.arg == 1 ? -m : m;
        } else {
          if (b == 0.0 && in.val < 0) return nan;
          s[sp - 1] = std::pow(b, in.val);
        }
        break;
      }
      case Op::Call: {
        double a = s[sp - 1];
        double r = 0;
        switch (in.fn) {
          case Fn::Exp: r = std::exp(a); break;
          case Fn::Ln:
            if (a <= 0) return nan;
            r = std::log(a);
            break;
          case Fn::Sqrt:
            if (a < 0) return nan;
            r = std::sqrt(a);
            break;
          case Fn::Sin: r = std::sin(a); break;
          case Fn::Cos: r = std::cos(a); break;
          case Fn::Sinh: r = std::sinh(a); break;
          case Fn::Cosh: r = std::cosh(a); break;
          case Fn::Tanh: r = std::tanh(a); break;
          case Fn::LambertW:
            if (a < -kInvE - 1e-15) return nan;
            r = lambert_w0(std::max(a, -kInvE));
            break;
        }
        s[sp - 1] = r;
        break;
      }
    }
  }
  double out = s[0];
  return std::isfinite(out) ? out : nan;
}

}  // namespace nlsym
