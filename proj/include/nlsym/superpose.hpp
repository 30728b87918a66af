#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nlsym/expr.hpp"
#include "nlsym/grid.hpp"
#include "nlsym/residual.hpp"
#include "nlsym/sample.hpp"

namespace nlsym {

// Antiderivative in `var` from a small table: linearity, powers and
// kernels (exp, sinh, cosh, tanh, sin, cos) of linear arguments, rational
// functions whose denominator splits into at most quadratic factors after
// removing a power of var, and rational functions of a single exp(a*var)
// through the substitution t = exp(a*var). Empty when nothing applies.
std::optional<Expr> antiderivative(const Expr& f, const std::string& var);

// tau with -2 d1 ln tau = u and -2 d0 ln tau = u1 - u^2/2, in x0, x1.
struct Potential {
  Expr tau;
  Expr source;
  Report x1_condition;
  Report x0_condition;
  bool verified() const { return x1_condition.pass && x0_condition.pass; }
};

// Sample domain used when none is given: x0 in [0.3, 1.3], x1 in [0.2, 1.2],
// complex evaluation, free constants set to 0.7, 0.8, ... in name order.
SampleDomain default_superpose_domain(const std::vector<Expr>& exprs);

// Builds tau from the antiderivative table and checks both conditions
// (symbolically, else sampled at tol 1e-9). Throws std::invalid_argument when
// an integral is outside the table, std::runtime_error when a condition fails.
Potential burgers_potential(const Expr& u);
Potential burgers_potential(const Expr& u, const SampleDomain& dom);

// Checks a caller-supplied tau against u; never throws on failure.
Potential potential_from(const Expr& u, const Expr& tau, const SampleDomain& dom);

// u3 = -2 d1 ln(c1*tau1 + c2*tau2). Throws std::invalid_argument when the
// weighted sum vanishes identically.
Expr burgers_superpose(const Potential& p1, const Potential& p2, const Expr& c1, const Expr& c2);
Expr burgers_superpose(const Expr& u1, const Expr& u2, const Expr& c1, const Expr& c2);

// The ratio r = c2/c1 for which -2 d1 ln(tau1 + r*tau2) equals target at one
// point; used to match composites whose constants carry no normalization.
std::complex<double> fit_weight_ratio(const Potential& p1, const Potential& p2, const Expr& target,
                                      const Bindings& at);

// Integration constant of the tau1 pairing: tau1 at column x1 on each x0
// slice. A single value is carried across slices by the evolution
// constraint; one value per slice is used as given.
struct NLHeatAnchor {
  double x1 = 0.0;
  std::vector<double> tau1;
};

struct NLHeatPairing {
  GridFunction tau1;
  GridFunction tau2;  // x1 - tau1
  NLHeatAnchor anchor;  // one tau1 per slice, as used
};

struct NLHeatOptions {
  double abs_tol = 1e-10;  // per-step RK4 error
  bool check_anchor = true;  // reject per-slice anchors breaking the evolution constraint
  Bindings constants;
};

struct NLHeatSuperposition {
  GridFunction u;
  NLHeatPairing pairing;
};

// 1/u3 = 1/u1(x0, tau1) + 1/u2(x0, tau2) with tau1 + tau2 = x1 and
// u1(x0, tau1) dtau1 = u2(x0, tau2) dtau2, over axes (x0, x1). u1, u2 are
// expressions in x0, x1. Throws std::runtime_error when u1 + u2 vanishes on
// the integration path, std::invalid_argument for a bad anchor.
NLHeatSuperposition nlheat_superpose(const Expr& u1, const Expr& u2, const std::vector<Axis>& axes,
                                     const NLHeatAnchor& anchor, const NLHeatOptions& opt = {});

// Finite-difference check of tau_k0 = tau_k1^-2 tau_k11 u_k(x0, tau_k)^-2 for
// k = 1, 2 and of tau1 + tau2 = x1 on interior points. The note lists each
// constraint's maximum.
Report verify_pairing(const NLHeatPairing& p, const Expr& u1, const Expr& u2, double tol = 1e-3,
                      const Bindings& constants = {});

}  // namespace nlsym
