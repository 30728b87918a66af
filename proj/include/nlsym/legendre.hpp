#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlsym/evaluate.hpp"
#include "nlsym/expr.hpp"
#include "nlsym/grid.hpp"

namespace nlsym {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using RatMat3 = std::array<std::array<Rational, 3>, 3>;
using Vars3 = std::array<std::string, 3>;

inline const Vars3 kXVars{"x0", "x1", "x2"};
inline const Vars3 kYVars{"y0", "y1", "y2"};

// The transform maps functions of y0..y2 to functions of x0..x2 and back.
// Returns {input vars, output vars} for e; throws std::invalid_argument when
// e mixes the two sets. Expressions with neither are read as functions of y.
std::pair<Vars3, Vars3> legendre_vars(const Expr& e);

Rational det(const RatMat3& m);

// (u_{mu nu}) = (v_{mu nu})^-1, exact. Throws std::domain_error when singular.
RatMat3 hessian_map(const RatMat3& m);
// Floating version; singular means |det| <= 1e-14 * |m|^3 (Frobenius norm).
Mat3 hessian_map(const Mat3& m);

// v = 1/2 y^T A y + b.y + c with rational A; b and c may involve constants.
struct Quadratic {
  RatMat3 a;
  std::array<Expr, 3> b;
  Expr c;
};

// Throws std::invalid_argument when v is not of that form in `vars`.
Quadratic quadratic_form(const Expr& v, const Vars3& vars);
Expr quadratic_expr(const Quadratic& q, const Vars3& vars);

// u = 1/2 (x - b)^T A^-1 (x - b) - c. Throws std::domain_error when det A = 0.
Expr legendre_quadratic(const Expr& v);

// A smooth function of three variables with value, gradient and Hessian at a
// point. Domain errors give NaN.
class Field3 {
public:
  virtual ~Field3() = default;
  virtual double value(const Vec3& p) const = 0;
  virtual Vec3 gradient(const Vec3& p) const = 0;
  virtual Mat3 hessian(const Vec3& p) const = 0;
};

class ExprField : public Field3 {
public:
  ExprField(const Expr& f, const Vars3& vars, const Bindings& constants = {});
  double value(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  Mat3 hessian(const Vec3& p) const override;

private:
  CompiledExpr f_;
  std::array<CompiledExpr, 3> d_;
  std::array<CompiledExpr, 6> dd_;  // 00 01 02 11 12 22
};

struct NewtonOptions {
  double tol = 1e-12;  // on |F| relative to 1 + |target|
  int max_iter = 60;
  Vec3 guess = Vec3::Zero();  // initial iterate at the first grid point
  Bindings constants;
};

class NewtonError : public std::runtime_error {
public:
  NewtonError(const std::string& what, Vec3 point, Vec3 last, double residual, bool singular);
  Vec3 point;  // grid point, in output variables
  Vec3 last;   // last iterate
  double residual;
  bool singular;
};

// Legendre transform of v evaluated pointwise: u(x) = x.y - v(y) with
// grad v(y) = x, found by damped Newton from a fixed guess.
class LegendreField : public Field3 {
public:
  LegendreField(const Field3& v, const NewtonOptions& opt = {});
  Vec3 invert(const Vec3& x) const;  // the y with grad v(y) = x
  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  Mat3 hessian(const Vec3& x) const override;

private:
  const Field3& v_;
  NewtonOptions opt_;
};

// Samples the Legendre image of v on axes (the output variables). Per point,
// damped Newton with step halving solves grad v(y) = x; the first column
// (last axis index 0) is swept in order from opt.guess, then rows run in
// parallel, each point seeded by its neighbour. Points where v cannot be
// evaluated are masked. Throws NewtonError on non-convergence or a singular
// Hessian.
GridFunction legendre_numeric(const Field3& v, const std::vector<Axis>& axes, const NewtonOptions& opt = {});
GridFunction legendre_numeric(const Expr& v, const std::vector<Axis>& axes, const NewtonOptions& opt = {});

struct SlidSuperposition {
  GridFunction u;
  std::array<GridFunction, 3> theta;
};

// u3(x) = u1(x - theta) + u2(theta) with grad u1(x - theta) = grad u2(theta),
// u1, u2 in x0..x2. opt.guess is the initial theta. Points where either
// solution (or a square-root argument in it) leaves its domain are masked.
// Throws NewtonError on divergence or when H1 + H2 is singular.
SlidSuperposition slid_superpose(const Expr& u1, const Expr& u2, const std::vector<Axis>& axes,
                                 const NewtonOptions& opt = {});

// Exact composite for two quadratics: theta = (A + B)^-1 (A x + b1 - b2).
Expr slid_superpose_quadratic(const Expr& u1, const Expr& u2);

}  // namespace nlsym
