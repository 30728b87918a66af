#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsym/expr.hpp"
#include "nlsym/grid.hpp"
#include "nlsym/residual.hpp"
#include "nlsym/sample.hpp"

namespace nlsym {

// Thrown when a generating formula's denominator vanishes identically.
class DegenerateSeed : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Symmetry operators of v0 = v11 in variables y0, y1 with dependent variable v.
enum class LinOp { P0, P1, I, D, G, F, S };

const char* lin_op_name(LinOp op);

struct SymOpLin {
  LinOp id;
  Expr xi0;  // coefficients may mention y0, y1 and the variable v
  Expr xi1;
  Expr eta;
};

// S requires b, a solution of b0 = b11 in y0, y1; it is checked and
// std::invalid_argument is thrown if it fails.
SymOpLin linear_heat_operator(LinOp op, std::optional<Expr> b = std::nullopt);

// Q[v] = eta - xi0*v0 - xi1*v1.
Expr characteristic(const SymOpLin& op, const Expr& v);

// New heat solution -Q[v], so that P0 maps v to v0 and D to 2*y0*v0 + y1*v1.
Expr apply_linear_symmetry(const SymOpLin& op, const Expr& v);
// Sum of the images under several operators, e.g. {P0, P1} gives v0 + v1.
Expr apply_linear_symmetry(const std::vector<SymOpLin>& ops, const Expr& v);

// u = -2 v1 / v with y0, y1 renamed to x0, x1. Throws std::invalid_argument
// when v is identically zero.
Expr cole_hopf(const Expr& v);

// A function of (x0, x1) given implicitly: value(x0, s) where s solves
// constraint(x0, s) = x1 inside [lo, hi].
struct ParametricSolution {
  std::string param = "tau";
  Expr value;
  Expr constraint;
  double lo = 0.1;
  double hi = 10.0;
};

// Explicit forms of p when constraint - x1 is affine or quadratic in the
// parameter (after clearing denominators); one entry per root branch.
// Empty when elimination is not attempted.
std::vector<Expr> eliminate(const ParametricSolution& p);

// Samples p over axes (x0, x1): per x0 row the parameter is tracked by
// Newton from the previous column, falling back to a bracketing scan of
// [lo, hi]. Points without a root, or with d(constraint)/d(param) ~ 0, are masked.
GridFunction sample_parametric(const ParametricSolution& p, const std::vector<Axis>& axes,
                               const Bindings& constants = {});

// Linearization of u0 = (u^-2 u1)_1: u = 1/v1, x1 = v, x0 = y0, returned with
// parameter y1. Throws std::invalid_argument when v1 vanishes identically.
ParametricSolution storm_forward(const Expr& v);

// Generating formulas for the Burgers equation in x0, x1.
Expr gen_burgers_P0(const Expr& u);    // u + u0 / (-u1/2 + u^2/4)
Expr gen_burgers_P0P1(const Expr& u);  // u - 2(u0 + u1) / (u1 - u^2/2 + u)
Expr gen_burgers_D(const Expr& u);     // u + (2x0u0 + u + x1u1) / (-x0(u1 - u^2/2) - x1u/2)

// Generating formula for the nonlinear heat equation: with the seed's spatial
// argument renamed tau, u' = u^5 / (u_tau^2 - u0 u^3 - u_tau u^2) and
// x1 = -u_tau u^-3 + u^-1.
ParametricSolution gen_nlheat_P0P1(const Expr& u);

enum class Generator { Thm1, Thm2, Thm3, Thm4 };
const char* generator_name(Generator g);
Generator generator_from_name(const std::string& name);  // thm1..thm4

// One application of a generator. For Thm3 the output must eliminate to a
// single explicit branch, otherwise std::runtime_error.
Expr generate(Generator g, const Expr& u);

struct ChainOptions {
  bool verify = false;
  SampleDomain domain;
  double tol = 1e-8;
};

struct ChainResult {
  std::vector<Expr> elements;  // seed first
  std::vector<Report> reports;  // one per element when verifying
  std::optional<std::size_t> stopped_at;  // step that failed
  std::string message;
};

// Applies the generator n times. A degenerate step stops the chain and
// records the step index instead of throwing.
ChainResult chain(Generator g, const Expr& seed, std::size_t n, const ChainOptions& opt = {});

// v' = -2 v1 / (v + r) in x0, x1. Throws std::invalid_argument when v + r
// vanishes identically.
Expr shift_generate(const Expr& v, const Expr& r);

// Denominator test used by the generators: simplifies to zero, or is below
// 1e-12 in magnitude at 20 sampled points with random constant values.
bool vanishes_identically(const Expr& e);

}  // namespace nlsym
