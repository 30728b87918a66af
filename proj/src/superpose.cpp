#include "nlsym/superpose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

#include "nlsym/calculus.hpp"
#include "nlsym/genform.hpp"
#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

Expr num(long long n) { return Expr::integer(n); }
Expr frac(long long p, long long q) { return Expr::fraction(p, q); }

Expr tidy(const Expr& e) {
  try {
    WorkLimit cap(kSymbolicWork);
    if (auto s = try_simplify(e)) return *s;
  } catch (const std::domain_error&) {
  }
  return e;
}

Expr d(const Expr& e, const std::string& v) {
  try {
    WorkLimit cap(kSymbolicWork);
    return differentiate(e, v);
  } catch (const std::runtime_error&) {
    return differentiate_raw(e, v);
  }
}

bool is_zero_coef(const Expr& e) { return tidy(e).is_zero(); }

// ---------------------------------------------------------------- antiderivatives

using Coeffs = std::vector<Expr>;

std::optional<std::pair<Expr, Expr>> linear_in(const Expr& arg, const std::string& x) {
  auto c = polynomial_coefficients(arg, x);
  if (!c || c->size() != 2 || is_zero_coef((*c)[1])) return std::nullopt;
  return std::make_pair((*c)[1], (*c)[0]);
}

Expr poly_expr(const Coeffs& c, const Expr& x) {
  std::vector<Expr> t;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (!c[j].is_zero()) t.push_back(c[j] * pow(x, static_cast<long long>(j)));
  return Expr::sum(t);
}

void trim(Coeffs& c) {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

// n = q*dd + r over coefficient expressions.
void divide(Coeffs n, const Coeffs& dd, Coeffs& q, Coeffs& r) {
  trim(n);
  q.assign(n.size() >= dd.size() ? n.size() - dd.size() + 1 : 0, Expr::integer(0));
  while (n.size() >= dd.size() && !n.empty()) {
    std::size_t shift = n.size() - dd.size();
    Expr k = tidy(n.back() / dd.back());
    q[shift] = k;
    for (std::size_t j = 0; j < dd.size(); ++j) n[shift + j] = tidy(n[shift + j] - k * dd[j]);
    n.pop_back();
    trim(n);
  }
  r = n;
}

struct Root {
  Expr at;
  int mult;
};

std::optional<std::vector<Root>> linear_factors(const Coeffs& c, const Expr& x) {
  std::vector<Root> roots;
  std::size_t k = 0;
  while (k < c.size() && c[k].is_zero()) ++k;
  if (k) roots.push_back({Expr::integer(0), static_cast<int>(k)});
  Coeffs rest(c.begin() + static_cast<std::ptrdiff_t>(k), c.end());
  std::size_t m = rest.size() - 1;
  if (m == 1) {
    roots.push_back({tidy(-rest[0] / rest[1]), 1});
  } else if (m == 2) {
    Expr disc = tidy(pow(rest[1], 2) - num(4) * rest[2] * rest[0]);
    if (disc.is_zero()) {
      roots.push_back({tidy(-rest[1] / (num(2) * rest[2])), 2});
    } else {
      for (int s : {1, -1}) roots.push_back({tidy((-rest[1] + num(s) * sqrt(disc)) / (num(2) * rest[2])), 1});
    }
  } else if (m > 2) {
    Expr r = tidy(-rest[m - 1] / (num(static_cast<long long>(m)) * rest[m]));
    Expr check = poly_expr(rest, x) - rest[m] * pow(x - r, static_cast<long long>(m));
    if (!simplifies_to_zero(check)) return std::nullopt;
    roots.push_back({r, static_cast<int>(m)});
  }
  return roots;
}

std::optional<Expr> integrate_rational(const Expr& n, const Expr& den, const std::string& xs) {
  Expr x = Expr::variable(xs);
  auto cn = polynomial_coefficients(n, xs), cd = polynomial_coefficients(den, xs);
  if (!cn || !cd || cd->empty()) return std::nullopt;
  Coeffs dd = *cd;
  trim(dd);
  if (dd.empty()) return std::nullopt;
  Coeffs q, r;
  divide(*cn, dd, q, r);
  std::vector<Expr> out;
  for (std::size_t j = 0; j < q.size(); ++j)
    if (!q[j].is_zero()) out.push_back(q[j] * pow(x, static_cast<long long>(j + 1)) / num(static_cast<long long>(j + 1)));
  if (!r.empty()) {
    auto roots = linear_factors(dd, x);
    if (!roots) return std::nullopt;
    Expr rem = poly_expr(r, x);
    for (std::size_t i = 0; i < roots->size(); ++i) {
      std::vector<Expr> others{dd.back()};
      for (std::size_t k = 0; k < roots->size(); ++k)
        if (k != i) others.push_back(pow(x - (*roots)[k].at, (*roots)[k].mult));
      // Not tidied: with surd roots the simplifier rationalizes g into 0/0 at the root.
      Expr g = rem / Expr::product(others);
      const Root& ri = (*roots)[i];
      Expr base = ri.at.is_zero() ? x : x - ri.at;
      long long fact = 1;
      for (int l = 0; l < ri.mult; ++l) {
        if (l) fact *= l;
        Expr a = tidy(substitute(g, {{xs, ri.at}}) / num(fact));
        int j = ri.mult - l;
        if (!a.is_zero()) out.push_back(j == 1 ? a * ln(base) : a * pow(base, 1 - j) / num(1 - j));
        if (l + 1 < ri.mult) g = d(g, xs);
      }
    }
  }
  return Expr::sum(out);
}

void exp_slopes(const Expr& e, const std::string& x, std::vector<Expr>& out) {
  if (e.kind() == Kind::Apply && e.fn() == Fn::Exp && depends_on(e, x)) {
    if (auto l = linear_in(e.children()[0], x))
      if (std::find(out.begin(), out.end(), l->first) == out.end()) out.push_back(l->first);
  }
  for (const auto& c : e.children()) exp_slopes(c, x, out);
}

std::optional<Expr> integrate_table(const Expr& e, const std::string& x);

// Rational in x, or rational in exp(a*x) after t = exp(a*x).
std::optional<Expr> integrate_fallback(const Expr& e, const std::string& x) {
  Expr s = tidy(e);
  auto [n, dn] = numer_denom(s);
  if (auto r = integrate_rational(n, dn, x)) return r;
  std::vector<Expr> slopes;
  exp_slopes(s, x, slopes);
  const std::string ts = "t#";
  Expr t = Expr::variable(ts);
  for (const Expr& a : slopes) {
    Expr sub = tidy(substitute(s, {{x, ln(t) / a}}) / (a * t));
    if (depends_on(sub, x)) continue;
    auto [sn, sd] = numer_denom(sub);
    auto r = integrate_rational(sn, sd, ts);
    if (r) return substitute(*r, {{ts, exp(a * Expr::variable(x))}});
  }
  return std::nullopt;
}

std::optional<Expr> integrate_table(const Expr& e, const std::string& x) {
  Expr X = Expr::variable(x);
  if (!depends_on(e, x)) return e * X;
  switch (e.kind()) {
    case Kind::Symbol:
      return pow(X, 2) / num(2);
    case Kind::Sum: {
      std::vector<Expr> parts;
      for (const auto& c : e.children()) {
        auto r = integrate_table(c, x);
        if (!r) return std::nullopt;
        parts.push_back(*r);
      }
      return Expr::sum(parts);
    }
    case Kind::Product: {
      std::vector<Expr> fixed, moving;
      for (const auto& c : e.children()) (depends_on(c, x) ? moving : fixed).push_back(c);
      if (moving.size() == 1) {
        auto r = integrate_table(moving[0], x);
        if (!r) return std::nullopt;
        fixed.push_back(*r);
        return Expr::product(fixed);
      }
      break;
    }
    case Kind::Quotient: {
      const Expr& nn = e.children()[0];
      const Expr& dn = e.children()[1];
      if (!depends_on(dn, x)) {
        auto r = integrate_table(nn, x);
        if (r) return *r / dn;
        return std::nullopt;
      }
      break;
    }
    case Kind::Power: {
      const Expr& b = e.children()[0];
      const Expr& p = e.children()[1];
      if (p.is_number()) {
        if (auto l = linear_in(b, x)) {
          if (p.value() == -1) return ln(b) / l->first;
          Expr k = Expr::number(p.value() + 1);
          return pow(b, k) / (k * l->first);
        }
      }
      break;
    }
    case Kind::Apply: {
      const Expr& arg = e.children()[0];
      auto l = linear_in(arg, x);
      if (!l) break;
      switch (e.fn()) {
        case Fn::Exp: return e / l->first;
        case Fn::Sinh: return cosh(arg) / l->first;
        case Fn::Cosh: return sinh(arg) / l->first;
        case Fn::Tanh: return ln(cosh(arg)) / l->first;
        case Fn::Sin: return -(Expr::apply(Fn::Cos, arg) / l->first);
        case Fn::Cos: return Expr::apply(Fn::Sin, arg) / l->first;
        default: break;
      }
      break;
    }
    default:
      break;
  }
  return integrate_fallback(e, x);
}

// ---------------------------------------------------------------- potentials

Report identity_report(const Expr& lhs, const Expr& rhs, const SampleDomain& dom) {
  Report r;
  r.tolerance = 1e-9;
  try {
    WorkLimit cap(kSymbolicWork);
    if (simplifies_to_zero(lhs - rhs)) {
      r.pass = true;
      r.method = Method::Symbolic;
      return r;
    }
  } catch (const std::exception&) {
  }
  r.method = Method::Sampled;
  try {
    EquivalenceReport e = equivalent(lhs, rhs, dom, r.tolerance);
    r.pass = e.pass;
    r.max_residual = r.max_abs_residual = e.worst_error;
    r.argmax = e.worst_point;
    r.samples = e.samples;
    r.rejected = e.rejected;
  } catch (const std::runtime_error& ex) {
    r.pass = false;
    r.note = ex.what();
  }
  return r;
}

// Replaces x1 in an expression known not to depend on it.
Expr pin_x1(const Expr& e, const SampleDomain& dom) {
  Bindings probe = dom.constants;
  probe["x0"] = dom.box.empty() ? 0.8 : 0.5 * (dom.box[0].lo + dom.box[0].hi);
  for (const Expr& v : {num(0), num(1), frac(1, 2), num(2), num(3), frac(1, 3)}) {
    Expr p = tidy(substitute(e, {{"x1", v}}));
    try {
      Complex z = evaluate(p, probe, {true});
      if (std::isfinite(std::abs(z))) return p;
    } catch (const EvalError&) {
    }
  }
  throw std::runtime_error("could not remove x1 from the x0 condition");
}

}  // namespace

std::optional<Expr> antiderivative(const Expr& f, const std::string& var) {
  try {
    auto r = integrate_table(f, var);
    if (r) return tidy(*r);
  } catch (const std::domain_error&) {
  }
  return std::nullopt;
}

SampleDomain default_superpose_domain(const std::vector<Expr>& exprs) {
  SampleDomain dom;
  dom.box = {{"x0", 0.3, 1.3}, {"x1", 0.2, 1.2}};
  dom.complex = true;
  std::set<std::string> consts;
  for (const auto& e : exprs)
    for (const auto& s : free_symbols(e))
      if (s != "x0" && s != "x1") consts.insert(s);
  double v = 0.7;
  for (const auto& c : consts) {
    dom.constants[c] = v;
    v += 0.1;
  }
  return dom;
}

Potential potential_from(const Expr& u, const Expr& tau, const SampleDomain& dom) {
  Potential p;
  p.tau = tau;
  p.source = u;
  Expr t0 = differentiate_raw(tau, "x0"), t1 = differentiate_raw(tau, "x1");
  p.x1_condition = identity_report(num(-2) * t1 / tau, u, dom);
  p.x0_condition = identity_report(num(-2) * t0 / tau, differentiate_raw(u, "x1") - frac(1, 2) * pow(u, 2), dom);
  return p;
}

Potential burgers_potential(const Expr& u) { return burgers_potential(u, default_superpose_domain({u})); }

Potential burgers_potential(const Expr& u, const SampleDomain& dom) {
  auto a = antiderivative(u, "x1");
  if (!a) {
    Expr s = tidy(u);
    if (s != u) a = antiderivative(s, "x1");
  }
  if (!a)
    throw std::invalid_argument("the x1-antiderivative of " + render(u) +
                                " is outside the supported table; supply tau with potential_from");
  Expr g = tidy(frac(1, 2) * (d(*a, "x0") - d(u, "x1") + frac(1, 2) * pow(u, 2)));
  if (depends_on(g, "x1")) {
    if (!vanishes_identically(differentiate_raw(g, "x1")))
      throw std::runtime_error("u is not a Burgers solution: the x0 condition depends on x1");
    g = pin_x1(g, dom);
  }
  auto G = antiderivative(g, "x0");
  if (!G)
    throw std::invalid_argument("the x0-antiderivative of " + render(g) +
                                " is outside the supported table; supply tau with potential_from");
  Expr tau = tidy(exp(-(frac(1, 2) * *a) + *G));
  Potential p = potential_from(u, tau, dom);
  if (!p.verified())
    throw std::runtime_error("potential " + render(tau) + " fails its defining conditions (worst " +
                             std::to_string(std::max(p.x1_condition.max_residual, p.x0_condition.max_residual)) + ")");
  return p;
}

Expr burgers_superpose(const Potential& p1, const Potential& p2, const Expr& c1, const Expr& c2) {
  Expr w = c1 * p1.tau + c2 * p2.tau;
  if (vanishes_identically(w)) throw std::invalid_argument("c1*tau1 + c2*tau2 vanishes identically");
  return tidy(num(-2) * d(w, "x1") / w);
}

Expr burgers_superpose(const Expr& u1, const Expr& u2, const Expr& c1, const Expr& c2) {
  SampleDomain dom = default_superpose_domain({u1, u2});
  return burgers_superpose(burgers_potential(u1, dom), burgers_potential(u2, dom), c1, c2);
}

std::complex<double> fit_weight_ratio(const Potential& p1, const Potential& p2, const Expr& target,
                                      const Bindings& at) {
  EvalOptions c{true};
  Complex a = evaluate(p1.tau, at, c), a1 = evaluate(differentiate_raw(p1.tau, "x1"), at, c);
  Complex b = evaluate(p2.tau, at, c), b1 = evaluate(differentiate_raw(p2.tau, "x1"), at, c);
  Complex t = evaluate(target, at, c);
  Complex den = t * b + 2.0 * b1;
  if (std::abs(den) == 0.0) throw std::runtime_error("fit_weight_ratio: target is the second solution itself here");
  return -(t * a + 2.0 * a1) / den;
}

// ---------------------------------------------------------------- nonlinear heat

namespace {

using Slope = std::function<double(double, double)>;

double rk4_step(const Slope& f, double t, double y, double h) {
  double k1 = f(t, y);
  double k2 = f(t + h / 2, y + h / 2 * k1);
  double k3 = f(t + h / 2, y + h / 2 * k2);
  double k4 = f(t + h, y + h * k3);
  return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

// y' = f(t, y) from (t0, y0) to t1 by RK4 with step doubling. Throws
// std::runtime_error when the step size collapses.
double rk4_adaptive(const Slope& f, double t0, double y0, double t1, double tol, double h) {
  double t = t0, y = y0;
  double dir = t1 >= t0 ? 1.0 : -1.0;
  h = std::fabs(h);
  while ((t1 - t) * dir > 0) {
    double left = std::fabs(t1 - t);
    double hh = std::min(h, left);
    double full = rk4_step(f, t, y, dir * hh);
    double half = rk4_step(f, t, y, dir * hh / 2);
    double two = rk4_step(f, t + dir * hh / 2, half, dir * hh / 2);
    double err = std::fabs(two - full) / 15.0;
    if (!std::isfinite(full) || !std::isfinite(two)) {
      h = hh / 4;
    } else if (err <= tol) {
      t = hh == left ? t1 : t + dir * hh;
      y = two + (two - full) / 15.0;
      h = hh * std::clamp(err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0, 0.2, 5.0);
    } else {
      h = hh * std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 1.0);
    }
    if (h < 1e-13 * (1.0 + std::fabs(t))) throw std::runtime_error("step size collapsed at " + std::to_string(t));
  }
  return y;
}

struct Pair {
  CompiledExpr u1, u2, u1s, u2s;

  Pair(const Expr& a, const Expr& b, const Bindings& c)
      : u1(a, {"x0", "x1"}, c),
        u2(b, {"x0", "x1"}, c),
        u1s(differentiate_raw(a, "x1"), {"x0", "x1"}, c),
        u2s(differentiate_raw(b, "x1"), {"x0", "x1"}, c) {}

  static double at(const CompiledExpr& f, double x0, double s) {
    double v[2] = {x0, s};
    return f(v);
  }

  // dtau1/dx1 at fixed x0.
  double slope(double x0, double x1, double t1) const {
    double a = at(u1, x0, t1), b = at(u2, x0, x1 - t1);
    double s = a + b;
    if (!(std::fabs(s) > 1e-12 * (std::fabs(a) + std::fabs(b)))) return std::numeric_limits<double>::quiet_NaN();
    return b / s;
  }

  // dtau1/dx0 along a fixed column from the evolution constraint.
  double drift(double x0, double x1, double t1) const {
    double t2 = x1 - t1;
    double a = at(u1, x0, t1), b = at(u2, x0, t2);
    double s = a + b;
    if (!(std::fabs(s) > 1e-12 * (std::fabs(a) + std::fabs(b)))) return std::numeric_limits<double>::quiet_NaN();
    double d1 = b / s, d2 = a / s;
    double ap = at(u1s, x0, t1) * d1, bp = at(u2s, x0, t2) * d2;
    double dd = (bp * a - b * ap) / (s * s);
    return dd / (d1 * d1 * a * a);
  }
};

}  // namespace

NLHeatSuperposition nlheat_superpose(const Expr& u1, const Expr& u2, const std::vector<Axis>& axes,
                                     const NLHeatAnchor& anchor, const NLHeatOptions& opt) {
  if (axes.size() != 2 || axes[0].var != "x0" || axes[1].var != "x1")
    throw std::invalid_argument("nlheat_superpose needs axes x0, x1");
  const Axis& ax0 = axes[0];
  const Axis& ax1 = axes[1];
  if (anchor.tau1.size() != 1 && anchor.tau1.size() != ax0.n)
    throw std::invalid_argument("anchor needs one tau1 value or one per x0 slice");
  Pair pr(u1, u2, opt.constants);
  const double X = anchor.x1;
  Slope drift = [&](double x0, double t) { return pr.drift(x0, X, t); };
  double h0 = ax0.n > 1 ? ax0.h() : 1e-2;

  std::vector<double> a(ax0.n);
  if (anchor.tau1.size() == 1) {
    a[0] = anchor.tau1[0];
    for (std::size_t i = 1; i < ax0.n; ++i) {
      try {
        a[i] = rk4_adaptive(drift, ax0.at(i - 1), a[i - 1], ax0.at(i), opt.abs_tol, h0 / 4);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("anchor propagation failed between x0 = " + std::to_string(ax0.at(i - 1)) + " and " +
                                 std::to_string(ax0.at(i)) + ": " + e.what());
      }
    }
  } else {
    a = anchor.tau1;
    if (opt.check_anchor) {
      for (std::size_t i = 1; i < ax0.n; ++i) {
        double want = rk4_adaptive(drift, ax0.at(i - 1), a[i - 1], ax0.at(i), opt.abs_tol, h0 / 4);
        if (std::fabs(want - a[i]) > 1e-6 * (1.0 + std::fabs(want)))
          throw std::invalid_argument("anchor at x0 = " + std::to_string(ax0.at(i)) +
                                      " is inconsistent with the evolution constraint (expected tau1 = " +
                                      std::to_string(want) + ")");
      }
    }
  }

  NLHeatSuperposition out;
  out.u = GridFunction(axes);
  out.pairing.tau1 = GridFunction(axes);
  out.pairing.tau2 = GridFunction(axes);
  out.pairing.anchor = {X, a};

  parallel_for(ax0.n, [&](std::size_t i) {
    double x0 = ax0.at(i);
    Slope f = [&](double x1, double t) { return pr.slope(x0, x1, t); };
    auto fill = [&](std::size_t j, double t1) {
      double x1 = ax1.at(j);
      std::size_t k = i * ax1.n + j;
      double t2 = x1 - t1;
      double va = Pair::at(pr.u1, x0, t1), vb = Pair::at(pr.u2, x0, t2);
      out.pairing.tau1[k] = t1;
      out.pairing.tau2[k] = t2;
      out.u[k] = va * vb / (va + vb);
    };
    double hs = ax1.n > 1 ? ax1.h() / 4 : 1e-2;
    try {
      double t = X, y = a[i];
      for (std::size_t j = 0; j < ax1.n; ++j) {
        if (ax1.at(j) < X) continue;
        y = rk4_adaptive(f, t, y, ax1.at(j), opt.abs_tol, hs);
        t = ax1.at(j);
        fill(j, y);
      }
      t = X;
      y = a[i];
      for (std::size_t j = ax1.n; j-- > 0;) {
        if (ax1.at(j) >= X) continue;
        y = rk4_adaptive(f, t, y, ax1.at(j), opt.abs_tol, hs);
        t = ax1.at(j);
        fill(j, y);
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("pairing singularity on slice x0 = " + std::to_string(x0) +
                               " (u1 + u2 vanishes on the path?): " + e.what());
    }
  });
  return out;
}

Report verify_pairing(const NLHeatPairing& p, const Expr& u1, const Expr& u2, double tol, const Bindings& constants) {
  Report rep;
  rep.method = Method::FiniteDifference;
  rep.tolerance = tol;
  const auto& axes = p.tau1.axes();
  if (axes.size() != 2 || axes[0].n < 3 || axes[1].n < 3)
    throw std::invalid_argument("verify_pairing needs a 2-d grid with at least 3 points per axis");
  Pair pr(u1, u2, constants);
  std::size_t n0 = axes[0].n, n1 = axes[1].n;
  double h0 = axes[0].h(), h1 = axes[1].h();
  double worst[3] = {0.0, 0.0, 0.0};
  bool any = false;
  for (std::size_t i = 1; i + 1 < n0; ++i) {
    for (std::size_t j = 1; j + 1 < n1; ++j) {
      std::size_t k = i * n1 + j;
      double x0 = axes[0].at(i), x1 = axes[1].at(j);
      double sum = std::fabs(p.tau1[k] + p.tau2[k] - x1);
      double score[3] = {sum, 0.0, 0.0};
      double raw[3] = {sum, 0.0, 0.0};
      bool ok = std::isfinite(sum);
      for (int c = 0; c < 2 && ok; ++c) {
        const GridFunction& T = c == 0 ? p.tau1 : p.tau2;
        const CompiledExpr& u = c == 0 ? pr.u1 : pr.u2;
        double t0 = (T[k + n1] - T[k - n1]) / (2 * h0);
        double t1 = (T[k + 1] - T[k - 1]) / (2 * h1);
        double t11 = (T[k + 1] - 2 * T[k] + T[k - 1]) / (h1 * h1);
        double uv = Pair::at(u, x0, T[k]);
        double rhs = t11 / (t1 * t1 * uv * uv);
        double r = t0 - rhs;
        raw[c + 1] = std::fabs(r);
        score[c + 1] = std::fabs(r) / (1.0 + std::fabs(t0) + std::fabs(rhs));
        ok = std::isfinite(score[c + 1]);
      }
      if (!ok) {
        ++rep.rejected;
        continue;
      }
      ++rep.samples;
      for (int c = 0; c < 3; ++c) {
        worst[c] = std::max(worst[c], score[c]);
        rep.max_abs_residual = std::max(rep.max_abs_residual, raw[c]);
        if (!any || score[c] > rep.max_residual) {
          rep.max_residual = score[c];
          rep.argmax = {{"x0", x0}, {"x1", x1}};
          any = true;
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "tau1+tau2=x1: %.3g; evolution k=1: %.3g; evolution k=2: %.3g", worst[0], worst[1],
                worst[2]);
  rep.note = buf;
  rep.pass = rep.samples > 0 && rep.max_residual <= tol;
  return rep;
}

}  // namespace nlsym
