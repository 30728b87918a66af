#include "nlsym/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "nlsym/calculus.hpp"
#include "nlsym/sample.hpp"
#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Expr deriv(const Expr& e, const std::string& v) {
  try {
    WorkLimit cap(kSymbolicWork);
    return differentiate(e, v);
  } catch (const std::runtime_error&) {
    return differentiate_raw(e, v);
  }
}

Expr tidy(const Expr& e) {
  WorkLimit cap(kSymbolicWork);
  if (auto s = try_simplify(e)) return *s;
  return e;
}

bool uses_any(const std::set<std::string>& vars, const Vars3& set) {
  for (const auto& v : set)
    if (vars.count(v)) return true;
  return false;
}

constexpr int kPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

bool singular(const Mat3& m) {
  double n = m.norm();
  return !std::isfinite(n) || std::fabs(m.determinant()) <= 1e-14 * n * n * n;
}

std::string fmt(const Vec3& v) {
  std::ostringstream s;
  s.precision(10);
  s << '(' << v[0] << ", " << v[1] << ", " << v[2] << ')';
  return s.str();
}

// Residual F, Jacobian J and the scale F is measured against at z; false
// when z is outside the domain.
using System = std::function<bool(const Vec3& z, Vec3& f, Mat3& j, double& scale)>;

// Damped Newton with step halving. nullopt when the start is outside the domain.
std::optional<Vec3> newton(const System& sys, Vec3 z, const Vec3& point, const NewtonOptions& opt,
                           const char* what) {
  Vec3 f;
  Mat3 j;
  double scale = 1.0;
  if (!sys(z, f, j, scale) || !f.allFinite()) return std::nullopt;
  for (int it = 0;; ++it) {
    double r = f.norm();
    if (r <= opt.tol * scale) return z;
    if (it == opt.max_iter)
      throw NewtonError(std::string(what) + ": no convergence after " + std::to_string(opt.max_iter) +
                            " iterations at " + fmt(point) + ", last iterate " + fmt(z),
                        point, z, r, false);
    if (singular(j))
      throw NewtonError(std::string(what) + ": singular Jacobian at " + fmt(point) + ", iterate " + fmt(z), point, z,
                        r, true);
    Vec3 step = j.partialPivLu().solve(-f);
    bool moved = false;
    for (double lambda = 1.0; lambda > 1e-12; lambda *= 0.5) {
      Vec3 zn = z + lambda * step, fn;
      Mat3 jn;
      double sn = 1.0;
      if (sys(zn, fn, jn, sn) && fn.allFinite() && fn.norm() < r) {
        z = zn;
        f = fn;
        j = jn;
        scale = sn;
        moved = true;
        break;
      }
    }
    if (!moved)
      throw NewtonError(std::string(what) + ": step halving stalled at " + fmt(point) + ", iterate " + fmt(z) +
                            ", |F| = " + std::to_string(r),
                        point, z, r, false);
  }
}

Vec3 coords3(const GridFunction& g, std::size_t i) {
  auto c = g.coords(i);
  return {c[0], c[1], c[2]};
}

// Continuation over a 3-axis grid: the first column (last index 0) in order,
// then every row in parallel. solve(point, seed) returns the solution or
// nullopt for a masked point; masked points pass their seed on.
void sweep(const GridFunction& g, const Vec3& guess,
           const std::function<std::optional<Vec3>(std::size_t, const Vec3&, const Vec3&)>& solve,
           std::vector<Vec3>& sol, std::vector<char>& ok) {
  const auto& ax = g.axes();
  std::size_t n1 = ax[1].n, n2 = ax[2].n, rows = ax[0].n * n1;
  sol.assign(g.size(), guess);
  ok.assign(g.size(), 0);
  auto visit = [&](std::size_t i, const Vec3& seed) {
    auto s = solve(i, coords3(g, i), seed);
    sol[i] = s ? *s : seed;
    ok[i] = s.has_value();
  };
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t i0 = r / n1, i1 = r % n1;
    Vec3 seed = guess;
    if (i1 > 0)
      seed = sol[(r - 1) * n2];
    else if (i0 > 0)
      seed = sol[(r - n1) * n2];
    visit(r * n2, seed);
  }
  parallel_for(rows, [&](std::size_t r) {
    for (std::size_t k = 1; k < n2; ++k) visit(r * n2 + k, sol[r * n2 + k - 1]);
  });
}

void require3(const std::vector<Axis>& axes) {
  if (axes.size() != 3) throw std::invalid_argument("the grid needs three axes");
}

// Arguments of square roots inside e.
void radicands(const Expr& e, std::vector<Expr>& out) {
  if (e.kind() == Kind::Apply && e.fn() == Fn::Sqrt) out.push_back(e.children()[0]);
  if (e.kind() == Kind::Power && e.children()[1].is_number() &&
      denominator(e.children()[1].value()) == 2)
    out.push_back(e.children()[0]);
  for (const auto& c : e.children()) radicands(c, out);
}

struct Guarded {
  ExprField f;
  std::vector<CompiledExpr> roots;

  Guarded(const Expr& e, const Bindings& k) : f(e, kXVars, k) {
    std::vector<Expr> r;
    radicands(e, r);
    for (const auto& a : r) roots.emplace_back(a, std::vector<std::string>(kXVars.begin(), kXVars.end()), k);
  }
  bool inside(const Vec3& p) const {
    for (const auto& r : roots)
      if (!(r(p.data()) > 0.0)) return false;
    return true;
  }
};

}  // namespace

NewtonError::NewtonError(const std::string& what, Vec3 p, Vec3 l, double r, bool s)
    : std::runtime_error(what), point(p), last(l), residual(r), singular(s) {}

std::pair<Vars3, Vars3> legendre_vars(const Expr& e) {
  auto vars = free_variables(e);
  bool x = uses_any(vars, kXVars), y = uses_any(vars, kYVars);
  for (const auto& v : vars)
    if (std::find(kXVars.begin(), kXVars.end(), v) == kXVars.end() &&
        std::find(kYVars.begin(), kYVars.end(), v) == kYVars.end())
      throw std::invalid_argument("variable '" + v + "' is neither x0..x2 nor y0..y2");
  if (x && y) throw std::invalid_argument("expression mixes x and y variables");
  if (x) return {kXVars, kYVars};
  return {kYVars, kXVars};
}

Rational det(const RatMat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

RatMat3 hessian_map(const RatMat3& m) {
  Rational dt = det(m);
  if (dt == 0) throw std::domain_error("degenerate Hessian: determinant is 0");
  RatMat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // cofactor of m[j][i]
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / dt;
    }
  return out;
}

Mat3 hessian_map(const Mat3& m) {
  if (singular(m)) throw std::domain_error("degenerate Hessian: determinant is numerically 0");
  return m.inverse();
}

Quadratic quadratic_form(const Expr& v, const Vars3& vars) {
  for (const auto& s : free_variables(v))
    if (std::find(vars.begin(), vars.end(), s) == vars.end())
      throw std::invalid_argument("variable '" + s + "' is not one of " + vars[0] + ", " + vars[1] + ", " + vars[2]);
  Quadratic q;
  std::map<std::string, Expr> zero;
  for (const auto& s : vars) zero[s] = Expr::integer(0);
  for (int i = 0; i < 3; ++i) {
    Expr di = deriv(v, vars[i]);
    for (int j = 0; j < 3; ++j) {
      Expr h = tidy(deriv(di, vars[j]));
      if (!h.is_number()) throw std::invalid_argument("not quadratic with rational Hessian: d2/d" + vars[i] + "d" +
                                                      vars[j] + " = " + render(h));
      q.a[i][j] = h.value();
    }
    q.b[i] = tidy(substitute(di, zero));
  }
  q.c = tidy(substitute(v, zero));
  if (!simplifies_to_zero(v - quadratic_expr(q, vars))) throw std::invalid_argument("not a quadratic polynomial");
  return q;
}

Expr quadratic_expr(const Quadratic& q, const Vars3& vars) {
  std::vector<Expr> t;
  for (int i = 0; i < 3; ++i) {
    Expr yi = Expr::variable(vars[i]);
    for (int j = 0; j < 3; ++j)
      if (q.a[i][j] != 0) t.push_back(Expr::number(q.a[i][j] / 2) * yi * Expr::variable(vars[j]));
    t.push_back(q.b[i] * yi);
  }
  t.push_back(q.c);
  return tidy(Expr::sum(t));
}

Expr legendre_quadratic(const Expr& v) {
  auto [in, out] = legendre_vars(v);
  Quadratic q = quadratic_form(v, in);
  RatMat3 inv = hessian_map(q.a);
  std::array<Expr, 3> s;
  for (int i = 0; i < 3; ++i) s[i] = Expr::variable(out[i]) - q.b[i];
  std::vector<Expr> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (inv[i][j] != 0) t.push_back(Expr::number(inv[i][j] / 2) * s[i] * s[j]);
  t.push_back(-q.c);
  return tidy(Expr::sum(t));
}

ExprField::ExprField(const Expr& f, const Vars3& vars, const Bindings& constants) {
  std::vector<std::string> slots(vars.begin(), vars.end());
  f_ = CompiledExpr(f, slots, constants);
  std::array<Expr, 3> d;
  for (int i = 0; i < 3; ++i) {
    d[i] = deriv(f, vars[i]);
    d_[i] = CompiledExpr(d[i], slots, constants);
  }
  for (int k = 0; k < 6; ++k) dd_[k] = CompiledExpr(deriv(d[kPairs[k][0]], vars[kPairs[k][1]]), slots, constants);
}

double ExprField::value(const Vec3& p) const { return f_(p.data()); }

Vec3 ExprField::gradient(const Vec3& p) const { return {d_[0](p.data()), d_[1](p.data()), d_[2](p.data())}; }

Mat3 ExprField::hessian(const Vec3& p) const {
  Mat3 h;
  for (int k = 0; k < 6; ++k) {
    auto [a, b] = kPairs[k];
    h(a, b) = h(b, a) = dd_[k](p.data());
  }
  return h;
}

LegendreField::LegendreField(const Field3& v, const NewtonOptions& opt) : v_(v), opt_(opt) {}

Vec3 LegendreField::invert(const Vec3& x) const {
  System sys = [&](const Vec3& y, Vec3& f, Mat3& j, double& scale) {
    f = v_.gradient(y) - x;
    j = v_.hessian(y);
    scale = 1.0 + x.norm();
    return f.allFinite() && j.allFinite();
  };
  auto y = newton(sys, opt_.guess, x, opt_, "legendre");
  return y ? *y : Vec3::Constant(kNaN);
}

double LegendreField::value(const Vec3& x) const {
  Vec3 y = invert(x);
  return x.dot(y) - v_.value(y);
}

Vec3 LegendreField::gradient(const Vec3& x) const { return invert(x); }

Mat3 LegendreField::hessian(const Vec3& x) const {
  Vec3 y = invert(x);
  Mat3 h = v_.hessian(y);
  if (!h.allFinite() || singular(h)) return Mat3::Constant(kNaN);
  return h.inverse();
}

GridFunction legendre_numeric(const Field3& v, const std::vector<Axis>& axes, const NewtonOptions& opt) {
  require3(axes);
  GridFunction g(axes);
  std::vector<Vec3> sol;
  std::vector<char> ok;
  sweep(
      g, opt.guess,
      [&](std::size_t, const Vec3& x, const Vec3& seed) -> std::optional<Vec3> {
        System sys = [&](const Vec3& y, Vec3& f, Mat3& j, double& scale) {
          f = v.gradient(y) - x;
          j = v.hessian(y);
          scale = 1.0 + x.norm();
          return f.allFinite() && j.allFinite();
        };
        return newton(sys, seed, x, opt, "legendre");
      },
      sol, ok);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!ok[i]) {
      g[i] = kNaN;
      continue;
    }
    Vec3 x = coords3(g, i);
    double val = x.dot(sol[i]) - v.value(sol[i]);
    g[i] = std::isfinite(val) ? val : kNaN;
  }
  return g;
}

GridFunction legendre_numeric(const Expr& v, const std::vector<Axis>& axes, const NewtonOptions& opt) {
  require3(axes);
  auto [in, out] = legendre_vars(v);
  for (int k = 0; k < 3; ++k)
    if (axes[k].var != out[k])
      throw std::invalid_argument("grid axis " + std::to_string(k) + " is '" + axes[k].var + "', expected '" + out[k] +
                                  "'");
  ExprField f(v, in, opt.constants);
  return legendre_numeric(f, axes, opt);
}

SlidSuperposition slid_superpose(const Expr& u1, const Expr& u2, const std::vector<Axis>& axes,
                                 const NewtonOptions& opt) {
  require3(axes);
  for (const Expr* u : {&u1, &u2})
    if (legendre_vars(*u).first != kXVars && !free_variables(*u).empty())
      throw std::invalid_argument("slid_superpose expects solutions in x0, x1, x2");
  Guarded a(u1, opt.constants), b(u2, opt.constants);
  SlidSuperposition out{GridFunction(axes), {GridFunction(axes), GridFunction(axes), GridFunction(axes)}};
  std::vector<Vec3> sol;
  std::vector<char> ok;
  sweep(
      out.u, opt.guess,
      [&](std::size_t, const Vec3& x, const Vec3& seed) -> std::optional<Vec3> {
        System sys = [&](const Vec3& th, Vec3& f, Mat3& j, double& scale) {
          Vec3 tau = x - th;
          if (!a.inside(tau) || !b.inside(th)) return false;
          Vec3 g1 = a.f.gradient(tau), g2 = b.f.gradient(th);
          f = g1 - g2;
          j = -a.f.hessian(tau) - b.f.hessian(th);
          scale = 1.0 + std::max(g1.norm(), g2.norm());
          return j.allFinite();
        };
        return newton(sys, seed, x, opt, "slid superposition (H1 + H2)");
      },
      sol, ok);
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    Vec3 x = coords3(out.u, i), th = sol[i];
    double val = ok[i] ? a.f.value(x - th) + b.f.value(th) : kNaN;
    if (!std::isfinite(val)) val = kNaN;
    out.u[i] = val;
    for (int k = 0; k < 3; ++k) out.theta[k][i] = std::isnan(val) ? kNaN : th[k];
  }
  return out;
}

Expr slid_superpose_quadratic(const Expr& u1, const Expr& u2) {
  Quadratic p = quadratic_form(u1, kXVars), q = quadratic_form(u2, kXVars);
  RatMat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = p.a[i][j] + q.a[i][j];
  RatMat3 inv = hessian_map(s);
  std::array<Expr, 3> rhs;
  for (int i = 0; i < 3; ++i) {
    std::vector<Expr> t{p.b[i], -q.b[i]};
    for (int j = 0; j < 3; ++j)
      if (p.a[i][j] != 0) t.push_back(Expr::number(p.a[i][j]) * Expr::variable(kXVars[j]));
    rhs[i] = Expr::sum(t);
  }
  std::map<std::string, Expr> theta, tau;
  for (int i = 0; i < 3; ++i) {
    std::vector<Expr> t;
    for (int j = 0; j < 3; ++j)
      if (inv[i][j] != 0) t.push_back(Expr::number(inv[i][j]) * rhs[j]);
    Expr th = tidy(Expr::sum(t));
    theta[kXVars[i]] = th;
    tau[kXVars[i]] = Expr::variable(kXVars[i]) - th;
  }
  return tidy(substitute(u1, tau) + substitute(u2, theta));
}

}  // namespace nlsym
