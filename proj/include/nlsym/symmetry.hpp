#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nlsym/expr.hpp"
#include "nlsym/genform.hpp"
#include "nlsym/residual.hpp"
#include "nlsym/sample.hpp"

namespace nlsym {

enum class SlidOp { P0, P1, P2, P3, I, J01, J02, J12, D, Q0, Q1, Q2 };

const char* slid_op_name(SlidOp op);
SlidOp slid_op_from_name(const std::string& name);

// X = xi^mu d_mu + eta d_u; coefficients in x0, x1, x2 and the variable u.
struct SymOpSlid {
  SlidOp id;
  std::string name;
  std::array<Expr, 3> xi;
  Expr eta;
};

std::vector<SymOpSlid> slid_generators();
SymOpSlid slid_generator(SlidOp op);

// Q[u] = eta(x, u) - xi^mu u_mu.
Expr characteristic(const SymOpSlid& op, const Expr& u);

// Coefficients (xi0, xi1, xi2, eta) of [X, Y] = X(Y^a) - Y(X^a).
std::array<Expr, 4> commutator(const SymOpSlid& x, const SymOpSlid& y);

// Constant coefficients c with field = sum c_k generators[k], or nothing when
// the field is not such a combination.
std::optional<std::vector<Rational>> span_coefficients(const std::array<Expr, 4>& field,
                                                       const std::vector<SymOpSlid>& generators);

struct InvarianceReport {
  bool pass = false;
  bool identically_zero = false;  // residual at rounding level for every eps
  double slope = 0.0;             // log-log fit of max |residual| against eps
  std::vector<double> eps;
  std::vector<double> max_residual;
  Bindings argmax;  // worst point at the largest eps
  std::string note;
};

inline const std::vector<double> kDefaultEps{1e-2, 5e-3, 2.5e-3, 1.25e-3};

// Samples max |Slid(u + eps Q[u])| for each eps. Passes when the slope is in
// [1.8, 2.2] or the residual vanishes to rounding. Throws
// std::invalid_argument when u itself fails the sampled check_solution at 1e-8.
InvarianceReport infinitesimal_check(const SymOpSlid& op, const Expr& u, const SampleDomain& dom,
                                     const std::vector<double>& eps = kDefaultEps);

enum class GroupKind { Translate, ScaleX, ScaleU, AddLinear, Rotate12, Lorentz01, Lorentz02 };

const char* group_kind_name(GroupKind k);
GroupKind group_kind_from_name(const std::string& name);

// Parameters: translate a0 a1 a2 a3; scale_x a4; scale_u a5; add_linear b0 b1
// b2; rotate_12 c1; lorentz_01 c2; lorentz_02 c3.
struct GroupElement {
  GroupKind kind;
  std::vector<Expr> params;
};

std::size_t group_param_count(GroupKind k);

// With the point map x' = T(x) and u' = U(u, x) of g, the new solution is
// U(u(T(x)), x). Throws std::invalid_argument on a wrong parameter count.
Expr apply_group_transform(const GroupElement& g, const Expr& u);

// u = base(x) + phi(w1, w2) with w1, w2 given in x. The reduced equation is
// written in w1, w2 and the jet symbols p1, p2, p11, p12, p22 of phi.
struct ReductionAnsatz {
  std::string id;
  std::string subalgebra;
  Expr base;
  std::array<Expr, 2> omega;
  Expr reduced;
  std::vector<Expr> solutions;
  SampleDomain domain;  // admissible domain for the solutions, with constants
};

std::vector<ReductionAnsatz> slid_reductions();

struct ReductionReport {
  bool pass = false;
  Method method = Method::Symbolic;
  Expr factor;  // Slid|ansatz = factor * reduced
  std::vector<Report> solutions;
  std::string note;
};

// Substitutes the ansatz into the Slid residual and divides by the reduced
// equation; passes when the quotient is free of the jet symbols and every
// listed solution passes check_solution at 1e-8. Falls back to 20 random
// polynomial phi when the symbolic quotient is out of budget.
ReductionReport check_reduction(const ReductionAnsatz& r);

// The seven operators of the linear heat algebra; S uses b (default 1).
std::vector<SymOpLin> linear_heat_generators(std::optional<Expr> b = std::nullopt);

}  // namespace nlsym
