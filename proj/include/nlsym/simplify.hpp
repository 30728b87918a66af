#pragma once

#include <cstddef>
#include <optional>

#include "nlsym/expr.hpp"

namespace nlsym {

// Canonical form: a reduced quotient of polynomials over Q in variables,
// constants and kernels (exp of a monomial, ln, sin, cos, lambertW, radicals).
// sinh, cosh and tanh are rewritten through exp; sqrt through ^(1/2).
// Throws std::domain_error on a literal division by zero and
// std::runtime_error if an intermediate polynomial exceeds the term budget.
Expr simplify(const Expr& e);

// Same as simplify but returns nothing when the term budget is exceeded.
std::optional<Expr> try_simplify(const Expr& e);

// Caps the polynomial term operations simplification may perform on this
// thread while alive; running out behaves like exceeding the term budget.
// Limits nest: the tighter one wins.
class WorkLimit {
public:
  explicit WorkLimit(std::size_t ops);
  ~WorkLimit();
  WorkLimit(const WorkLimit&) = delete;
  WorkLimit& operator=(const WorkLimit&) = delete;

private:
  std::size_t saved_;
};

// Term operations granted to symbolic zero tests inside verification.
inline constexpr std::size_t kSymbolicWork = 200000;

// True only when the expression provably simplifies to 0.
bool simplifies_to_zero(const Expr& e);

// Numerator and denominator of the canonical form.
std::pair<Expr, Expr> numer_denom(const Expr& e);

// Coefficients of e as a polynomial in the named symbol; empty when e is not
// a polynomial in it with nonnegative integer exponents. Index = degree.
std::optional<std::vector<Expr>> polynomial_coefficients(const Expr& e, const std::string& name);

}  // namespace nlsym
