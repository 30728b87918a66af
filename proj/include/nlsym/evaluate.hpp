#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "nlsym/expr.hpp"

namespace nlsym {

using Complex = std::complex<double>;
using Bindings = std::map<std::string, Complex>;

struct EvalOptions {
  bool complex = false;  // principal branches; real mode rejects leaving the reals
};

// Throws EvalError naming the offending subtree on poles and branch violations.
Complex evaluate(const Expr& e, const Bindings& at, EvalOptions opt = {});
double evaluate_real(const Expr& e, const Bindings& at);

// Principal branch W0. Real version throws std::domain_error below -1/e.
double lambert_w0(double z);
Complex lambert_w0(Complex z);

// Flat postfix program over named slots, for evaluating one expression at many
// real points. Symbols not listed as slots are bound once from `fixed`.
// Domain violations yield NaN instead of throwing.
class CompiledExpr {
public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, std::vector<std::string> slots, const Bindings& fixed = {});

  double operator()(const double* values) const;
  double operator()(const std::vector<double>& values) const { return (*this)(values.data()); }
  const std::vector<std::string>& slots() const { return slots_; }

private:
  enum class Op { Const, Slot, Add, Mul, Div, Pow, PowInt, Root, Call };
  struct Instr {
    Op op;
    int arg = 0;
    double val = 0.0;
    Fn fn = Fn::Exp;
  };
  void emit(const Expr& e, const Bindings& fixed);

  std::vector<Instr> code_;
  std::vector<std::string> slots_;
  std::size_t depth_ = 0;
};

}  // namespace nlsym
