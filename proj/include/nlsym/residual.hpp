#pragma once

#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "nlsym/expr.hpp"
#include "nlsym/grid.hpp"
#include "nlsym/sample.hpp"

namespace nlsym {

enum class Equation { Burgers, NLHeat, LinHeat, DAlembert, Slid };

const char* equation_name(Equation eq);
// Accepts "burgers", "nlheat", "linheat", "dalembert", "slid" (case-insensitive).
Equation equation_from_name(const std::string& name);

struct PDESpec {
  Equation id;
  std::vector<std::string> vars;  // independent variables, index order = derivative index
};

// Default variables: x0,x1 for Burgers/NLHeat, y0,y1 for LinHeat,
// y0,y1,y2 for DAlembert, x0,x1,x2 for Slid.
PDESpec pde(Equation id);
PDESpec pde(Equation id, std::vector<std::string> vars);

// Value, gradient and Hessian of u at one point. Unused slots are ignored.
template <class T>
struct Jet {
  T u;
  std::array<T, 3> d;
  std::array<std::array<T, 3>, 3> dd;
};

template <class T>
T jet_constant(int n) {
  if constexpr (std::is_same_v<T, Expr>)
    return Expr::integer(n);
  else
    return T(n);
}

// Summands of the residual; their sum is the residual and the sum of their
// magnitudes scales the sampled tolerance.
template <class T>
std::vector<T> residual_terms(Equation eq, const Jet<T>& j) {
  const auto& d = j.d;
  const auto& h = j.dd;
  switch (eq) {
    case Equation::Burgers:
      return {d[0], j.u * d[1], -h[1][1]};
    case Equation::NLHeat: {
      T inv = jet_constant<T>(1) / j.u;
      T inv2 = inv * inv;
      return {d[0], -(inv2 * h[1][1]), jet_constant<T>(2) * inv2 * inv * d[1] * d[1]};
    }
    case Equation::LinHeat:
      return {d[0], -h[1][1]};
    case Equation::DAlembert:
      return {h[0][0], -h[1][1], -h[2][2]};
    case Equation::Slid:
      return {h[1][1] * h[2][2], -(h[1][2] * h[1][2]), -(h[0][0] * h[2][2]),
              h[0][2] * h[0][2],  -(h[0][0] * h[1][1]), h[0][1] * h[0][1]};
  }
  return {};
}

template <class T>
T residual_value(Equation eq, const Jet<T>& j) {
  std::vector<T> t = residual_terms(eq, j);
  T s = t[0];
  for (std::size_t i = 1; i < t.size(); ++i) s = s + t[i];
  return s;
}

// Residual written over jet symbols u, u0, u1, u00, u01, ... (declared as
// variables), e.g. Burgers gives u0 + u*u1 - u11.
Expr residual_template(const PDESpec& spec);

// Symbolic residual of u, simplified when the simplifier's budget allows.
// Throws std::invalid_argument if u depends on a variable outside spec.vars.
Expr residual(const PDESpec& spec, const Expr& u);

enum class Method { Symbolic, Sampled, FiniteDifference };
const char* method_name(Method m);

struct Report {
  bool pass = false;
  // Largest residual measure compared against tol. For sampled checks this is
  // |R| / (1 + sum |terms|); for finite differences it is |R|.
  double max_residual = 0.0;
  double max_abs_residual = 0.0;
  Bindings argmax;
  std::size_t samples = 0;
  std::size_t rejected = 0;
  Method method = Method::Symbolic;
  double tolerance = 0.0;
  std::string note;
};

std::string report_json(const Report& r, int indent = -1);

// Symbolic zero test first; otherwise samples the domain.
// Throws std::runtime_error when every sample is rejected.
Report check_solution(const PDESpec& spec, const Expr& u, const SampleDomain& domain, double tol);

struct CheckOptions {
  bool symbolic = true;
};
Report check_solution(const PDESpec& spec, const Expr& u, const SampleDomain& domain, double tol,
                      const CheckOptions& opt);

// Residual on the interior of g (one point trimmed per side) from compact
// central stencils. Axes of g must be spec.vars in order, each with n >= 5.
// Masked (NaN) samples propagate to every stencil that touches them.
GridFunction fd_residual(const PDESpec& spec, const GridFunction& g);

// Report over a residual grid; pass iff the largest finite |value| <= tol.
Report grid_report(const GridFunction& r, double tol);

}  // namespace nlsym
