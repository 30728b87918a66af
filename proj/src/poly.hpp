#pragma once

// Sparse multivariate Laurent-Puiseux polynomials over Q and their quotients.
// Generators are symbols, opaque floats, function kernels and radicals.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "nlsym/expr.hpp"

namespace nlsym::detail {

using Exp = boost::rational<long long>;

enum class GenKind { Symbol, Float, Kernel, Root };

struct Gen {
  GenKind kind;
  std::string key;  // total order of generators
  Expr atom;        // Symbol, Float or Apply(fn, arg) as displayed
  Fn fn = Fn::Exp;  // Kernel only
  Expr base;        // Root only: the radicand, canonical
  long long index = 1;
};

const Gen* symbol_gen(const Expr& sym);
const Gen* float_gen(double v);
const Gen* kernel_gen(Fn f, const Expr& canonical_arg);
const Gen* root_gen(const Expr& canonical_base, long long index);
const Gen* imag_gen();

struct Monomial {
  std::vector<std::pair<const Gen*, Exp>> f;  // ascending generator key, nonzero exponents

  bool empty() const { return f.empty(); }
  Exp degree(const Gen* g) const;
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f == b.f; }
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_pow(const Monomial& a, const Exp& e);
Monomial mono_single(const Gen* g, const Exp& e);

// Lex order, most significant generator first; "greater" sorts first.
struct MonoGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class BudgetExceeded : public std::runtime_error {
public:
  BudgetExceeded() : std::runtime_error("simplification budget exceeded") {}
};

// Term operations on this thread, checked against the active WorkLimit.
struct WorkMeter {
  std::size_t used = 0;
  std::size_t limit = static_cast<std::size_t>(-1);
};
WorkMeter& work_meter();

class Poly {
public:
  using Terms = std::map<Monomial, Rational, MonoGreater>;

  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly gen(const Gen* g, const Exp& e = Exp(1));
  static Poly term(const Rational& c, Monomial m);

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant
  bool is_monomial() const { return t_.size() == 1; }
  const Terms& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }
  const Monomial& lead_mono() const { return t_.begin()->first; }
  const Rational& lead_coef() const { return t_.begin()->second; }

  void add_term(const Monomial& m, const Rational& c);

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly times(const Monomial& m) const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }

  std::vector<const Gen*> gens() const;

private:
  Terms t_;
};

Poly poly_pow(const Poly& p, unsigned long n);

// Division that must be exact (nonnegative exponents); throws otherwise.
Poly exact_divide(const Poly& a, const Poly& b);
Poly poly_gcd(const Poly& a, const Poly& b);

class RatFunc {
public:
  RatFunc() : num_(), den_(Poly::constant(1)) {}
  RatFunc(Poly n);  // NOLINT(google-explicit-constructor)
  static RatFunc make(Poly n, Poly d);  // normalizes
  // As make, trusting the caller that n and d share no polynomial factor.
  static RatFunc make_coprime(Poly n, Poly d);
  static RatFunc constant(const Rational& c) { return RatFunc(Poly::constant(c)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
  bool is_monomial() const { return num_.is_monomial() && den_.is_monomial(); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);

private:
  static RatFunc normalize(Poly n, Poly d, bool coprime);

public:
  RatFunc operator-() const;
  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

private:
  Poly num_, den_;
};

RatFunc rat_pow(const RatFunc& r, long long n);

// Expression conversion lives in simplify.cpp.
RatFunc to_rat(const Expr& e);
Expr to_expr(const RatFunc& r);
Expr poly_to_expr(const Poly& p);

}  // namespace nlsym::detail
