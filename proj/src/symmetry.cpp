#include "nlsym/symmetry.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nlsym/calculus.hpp"
#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

Expr num(long long n) { return Expr::integer(n); }
Expr X(int i) { return Expr::variable("x" + std::to_string(i)); }
const Expr U = Expr::variable("u");
const std::vector<std::string> kX{"x0", "x1", "x2"};

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

constexpr int kPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

// Applies X to f(x, u).
Expr act(const SymOpSlid& x, const Expr& f) {
  std::vector<Expr> t;
  for (int m = 0; m < 3; ++m)
    if (!x.xi[m].is_zero()) t.push_back(x.xi[m] * d(f, kX[m]));
  if (!x.eta.is_zero()) t.push_back(x.eta * d(f, "u"));
  return Expr::sum(t);
}

// Coefficients of a field component linear in (1, x0, x1, x2, u).
std::optional<std::array<Rational, 5>> linear_coefficients(const Expr& f) {
  std::map<std::string, Expr> zero{{"x0", num(0)}, {"x1", num(0)}, {"x2", num(0)}, {"u", num(0)}};
  std::array<Rational, 5> c;
  std::vector<Expr> rebuilt;
  Expr c0 = tidy(substitute(f, zero));
  if (!c0.is_number()) return std::nullopt;
  c[0] = c0.value();
  rebuilt.push_back(c0);
  const char* names[] = {"x0", "x1", "x2", "u"};
  for (int k = 0; k < 4; ++k) {
    Expr ck = tidy(d(f, names[k]));
    if (!ck.is_number()) return std::nullopt;
    c[k + 1] = ck.value();
    rebuilt.push_back(ck * Expr::variable(names[k]));
  }
  if (!simplifies_to_zero(f - Expr::sum(rebuilt))) return std::nullopt;
  return c;
}

// Solves m c = rhs exactly; nothing when inconsistent. Free unknowns are 0.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs) {
  std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    std::swap(rhs[p], rhs[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (rhs[i] != 0) return std::nullopt;
  std::vector<Rational> out(cols, Rational(0));
  for (std::size_t i = 0; i < r; ++i) out[pivot_col[i]] = rhs[i] / m[i][pivot_col[i]];
  return out;
}

template <class T>
Jet<T> hessian_jet(const std::array<T, 6>& h) {
  Jet<T> j{};
  for (int k = 0; k < 6; ++k) {
    auto [a, b] = kPairs[k];
    j.dd[a][b] = j.dd[b][a] = h[k];
  }
  return j;
}

Expr rotate(const Expr& a, const Expr& b, const Expr& c, Fn cs, Fn sn, bool lorentz) {
  // a cos c - b sin c (rotation) or a cosh c + b sinh c (boost)
  Expr s = b * Expr::apply(sn, c);
  return a * Expr::apply(cs, c) + (lorentz ? s : -s);
}

// Slid over jet symbols of u = base + phi(w1, w2).
Expr ansatz_residual(const ReductionAnsatz& r) {
  const char* pn[] = {"p1", "p2"};
  Expr p[2] = {Expr::variable(pn[0]), Expr::variable(pn[1])};
  Expr pp[2][2] = {{Expr::variable("p11"), Expr::variable("p12")}, {Expr::variable("p12"), Expr::variable("p22")}};
  std::array<std::array<Expr, 3>, 2> dw;
  for (int a = 0; a < 2; ++a)
    for (int m = 0; m < 3; ++m) dw[a][m] = d(r.omega[a], kX[m]);
  Jet<Expr> j{};
  for (int m = 0; m < 3; ++m)
    for (int n = m; n < 3; ++n) {
      std::vector<Expr> t{d(d(r.base, kX[m]), kX[n])};
      for (int a = 0; a < 2; ++a) {
        t.push_back(p[a] * d(dw[a][m], kX[n]));
        for (int b = 0; b < 2; ++b) t.push_back(pp[a][b] * dw[a][m] * dw[b][n]);
      }
      j.dd[m][n] = j.dd[n][m] = Expr::sum(t);
    }
  return residual_value(Equation::Slid, j);
}

Expr on_x(const ReductionAnsatz& r, const Expr& e) { return substitute(e, {{"w1", r.omega[0]}, {"w2", r.omega[1]}}); }

bool jet_free(const Expr& e) {
  for (const char* s : {"p1", "p2", "p11", "p12", "p22"})
    if (depends_on(e, s)) return false;
  return true;
}

// Ratio Slid|ansatz / reduced for random quadratic phi at random points; the
// ratio must not depend on phi.
bool ratio_constant(const ReductionAnsatz& r, std::string& note) {
  Expr lhs = ansatz_residual(r), rhs = on_x(r, r.reduced);
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::vector<Bindings> pts = r.domain.points();
  if (pts.size() > 5) pts.resize(5);
  for (const auto& x : pts) {
    double first = 0.0;
    for (int k = 0; k < 20; ++k) {
      // phi = sum c_ab w1^a w2^b with a + b <= 2
      double c[6];
      for (double& v : c) v = coef(rng);
      double w1 = evaluate_real(r.omega[0], x), w2 = evaluate_real(r.omega[1], x);
      Bindings at = x;
      at["p1"] = c[1] + 2 * c[3] * w1 + c[4] * w2;
      at["p2"] = c[2] + c[4] * w1 + 2 * c[5] * w2;
      at["p11"] = 2 * c[3];
      at["p12"] = c[4];
      at["p22"] = 2 * c[5];
      double ratio = evaluate_real(lhs, at) / evaluate_real(rhs, at);
      if (k == 0) first = ratio;
      if (!std::isfinite(ratio) || std::fabs(ratio - first) > 1e-8 * (1.0 + std::fabs(first))) {
        std::ostringstream s;
        s << "ratio varies with phi at " << describe_point(x) << ": " << first << " vs " << ratio;
        note = s.str();
        return false;
      }
    }
  }
  return true;
}

}  // namespace

const char* slid_op_name(SlidOp op) {
  static const char* const names[] = {"P0", "P1", "P2", "P3", "I", "J01", "J02", "J12", "D", "Q0", "Q1", "Q2"};
  return names[static_cast<int>(op)];
}

SlidOp slid_op_from_name(const std::string& name) {
  for (int k = 0; k < 12; ++k)
    if (name == slid_op_name(static_cast<SlidOp>(k))) return static_cast<SlidOp>(k);
  throw std::invalid_argument("unknown operator '" + name + "' (P0 P1 P2 P3 I J01 J02 J12 D Q0 Q1 Q2)");
}

SymOpSlid slid_generator(SlidOp op) {
  SymOpSlid g{op, slid_op_name(op), {num(0), num(0), num(0)}, num(0)};
  switch (op) {
    case SlidOp::P0: g.xi[0] = num(1); break;
    case SlidOp::P1: g.xi[1] = num(1); break;
    case SlidOp::P2: g.xi[2] = num(1); break;
    case SlidOp::P3: g.eta = num(1); break;
    case SlidOp::I: g.eta = U; break;
    case SlidOp::J01: g.xi = {X(1), X(0), num(0)}; break;
    case SlidOp::J02: g.xi = {X(2), num(0), X(0)}; break;
    case SlidOp::J12: g.xi = {num(0), -X(2), X(1)}; break;
    case SlidOp::D: g.xi = {X(0), X(1), X(2)}; break;
    case SlidOp::Q0: g.eta = X(0); break;
    case SlidOp::Q1: g.eta = X(1); break;
    case SlidOp::Q2: g.eta = X(2); break;
  }
  return g;
}

std::vector<SymOpSlid> slid_generators() {
  std::vector<SymOpSlid> out;
  for (int k = 0; k < 12; ++k) out.push_back(slid_generator(static_cast<SlidOp>(k)));
  return out;
}

Expr characteristic(const SymOpSlid& op, const Expr& u) {
  std::vector<Expr> t{substitute(op.eta, {{"u", u}})};
  for (int m = 0; m < 3; ++m)
    if (!op.xi[m].is_zero()) t.push_back(-(substitute(op.xi[m], {{"u", u}}) * d(u, kX[m])));
  return tidy(Expr::sum(t));
}

std::array<Expr, 4> commutator(const SymOpSlid& x, const SymOpSlid& y) {
  std::array<Expr, 4> fx{x.xi[0], x.xi[1], x.xi[2], x.eta}, fy{y.xi[0], y.xi[1], y.xi[2], y.eta};
  std::array<Expr, 4> out;
  for (int a = 0; a < 4; ++a) out[a] = tidy(act(x, fy[a]) - act(y, fx[a]));
  return out;
}

std::optional<std::vector<Rational>> span_coefficients(const std::array<Expr, 4>& field,
                                                       const std::vector<SymOpSlid>& generators) {
  std::vector<std::vector<Rational>> m(20, std::vector<Rational>(generators.size()));
  std::vector<Rational> rhs(20);
  for (int a = 0; a < 4; ++a) {
    auto t = linear_coefficients(field[a]);
    if (!t) return std::nullopt;
    for (int k = 0; k < 5; ++k) rhs[a * 5 + k] = (*t)[k];
  }
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const auto& op = generators[g];
    std::array<Expr, 4> f{op.xi[0], op.xi[1], op.xi[2], op.eta};
    for (int a = 0; a < 4; ++a) {
      auto t = linear_coefficients(f[a]);
      if (!t) throw std::invalid_argument("generator " + op.name + " is not linear in x and u");
      for (int k = 0; k < 5; ++k) m[a * 5 + k][g] = (*t)[k];
    }
  }
  return solve_exact(m, rhs);
}

InvarianceReport infinitesimal_check(const SymOpSlid& op, const Expr& u, const SampleDomain& dom,
                                     const std::vector<double>& eps) {
  if (eps.size() < 2) throw std::invalid_argument("infinitesimal_check needs at least two eps values");
  PDESpec spec = pde(Equation::Slid);
  Report pre = check_solution(spec, u, dom, 1e-8, CheckOptions{false});
  if (!pre.pass)
    throw std::invalid_argument("u is not a Slid solution (residual " + std::to_string(pre.max_residual) + " at " +
                                describe_point(pre.argmax) + ")");
  Expr q = characteristic(op, u);
  std::array<CompiledExpr, 6> hu, hq;
  for (int k = 0; k < 6; ++k) {
    auto [a, b] = kPairs[k];
    // untidied: only evaluated numerically
    hu[k] = CompiledExpr(differentiate_raw(differentiate_raw(u, kX[a]), kX[b]), kX, dom.constants);
    hq[k] = CompiledExpr(differentiate_raw(differentiate_raw(q, kX[a]), kX[b]), kX, dom.constants);
  }
  std::vector<Bindings> pts = dom.points();
  InvarianceReport rep;
  rep.eps = eps;
  rep.max_residual.assign(eps.size(), 0.0);
  bool zero = true;
  std::size_t used = 0;
  for (const auto& p : pts) {
    double x[3] = {p.at("x0").real(), p.at("x1").real(), p.at("x2").real()};
    std::array<double, 6> a, b;
    bool ok = true;
    for (int k = 0; k < 6; ++k) {
      a[k] = hu[k](x);
      b[k] = hq[k](x);
      ok = ok && std::isfinite(a[k]) && std::isfinite(b[k]);
    }
    if (!ok) continue;
    ++used;
    double base = residual_value(Equation::Slid, hessian_jet(a));
    for (std::size_t e = 0; e < eps.size(); ++e) {
      std::array<double, 6> h;
      for (int k = 0; k < 6; ++k) h[k] = a[k] + eps[e] * b[k];
      auto terms = residual_terms(Equation::Slid, hessian_jet(h));
      double r = 0.0, mag = 0.0;
      for (double t : terms) {
        r += t;
        mag += std::fabs(t);
      }
      r = std::fabs(r - base);
      if (r > 1e-11 * (1.0 + mag)) zero = false;
      if (r > rep.max_residual[e]) {
        rep.max_residual[e] = r;
        if (e == 0) rep.argmax = p;
      }
    }
  }
  if (used == 0) throw std::runtime_error("infinitesimal_check: no admissible sample points");
  rep.identically_zero = zero;
  // least-squares slope of log r against log eps
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    double lx = std::log(eps[e]), ly = std::log(std::max(rep.max_residual[e], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.pass = zero || (rep.slope >= 1.8 && rep.slope <= 2.2);
  std::ostringstream s;
  s << op.name << ": " << (zero ? "residual vanishes to rounding" : "slope " + std::to_string(rep.slope)) << " over "
    << used << " points";
  rep.note = s.str();
  return rep;
}

const char* group_kind_name(GroupKind k) {
  static const char* const names[] = {"translate", "scale_x", "scale_u", "add_linear", "rotate_12", "lorentz_01",
                                      "lorentz_02"};
  return names[static_cast<int>(k)];
}

GroupKind group_kind_from_name(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '_' && c != '-') n += c;
  for (int k = 0; k < 7; ++k) {
    std::string m;
    for (const char* c = group_kind_name(static_cast<GroupKind>(k)); *c; ++c)
      if (*c != '_') m += *c;
    if (n == m) return static_cast<GroupKind>(k);
  }
  throw std::invalid_argument("unknown transformation '" + name +
                              "' (translate scale_x scale_u add_linear rotate_12 lorentz_01 lorentz_02)");
}

std::size_t group_param_count(GroupKind k) {
  switch (k) {
    case GroupKind::Translate: return 4;
    case GroupKind::AddLinear: return 3;
    default: return 1;
  }
}

Expr apply_group_transform(const GroupElement& g, const Expr& u) {
  if (g.params.size() != group_param_count(g.kind))
    throw std::invalid_argument(std::string(group_kind_name(g.kind)) + " takes " +
                                std::to_string(group_param_count(g.kind)) + " parameters");
  const auto& c = g.params;
  std::map<std::string, Expr> t;
  switch (g.kind) {
    case GroupKind::Translate:
      for (int m = 0; m < 3; ++m) t[kX[m]] = X(m) + c[m];
      return substitute(u, t) + c[3];
    case GroupKind::ScaleX:
      for (int m = 0; m < 3; ++m) t[kX[m]] = exp(c[0]) * X(m);
      return substitute(u, t);
    case GroupKind::ScaleU:
      return exp(c[0]) * u;
    case GroupKind::AddLinear:
      return u + c[0] * X(0) + c[1] * X(1) + c[2] * X(2);
    case GroupKind::Rotate12:
      t["x1"] = rotate(X(1), X(2), c[0], Fn::Cos, Fn::Sin, false);
      t["x2"] = X(1) * Expr::apply(Fn::Sin, c[0]) + X(2) * Expr::apply(Fn::Cos, c[0]);
      return substitute(u, t);
    case GroupKind::Lorentz01:
      t["x0"] = rotate(X(0), X(1), c[0], Fn::Cosh, Fn::Sinh, true);
      t["x1"] = rotate(X(1), X(0), c[0], Fn::Cosh, Fn::Sinh, true);
      return substitute(u, t);
    case GroupKind::Lorentz02:
      t["x0"] = rotate(X(0), X(2), c[0], Fn::Cosh, Fn::Sinh, true);
      t["x2"] = rotate(X(2), X(0), c[0], Fn::Cosh, Fn::Sinh, true);
      return substitute(u, t);
  }
  return u;
}

std::vector<ReductionAnsatz> slid_reductions() {
  const SymbolTable syms = SymbolTable::with({"x0", "x1", "x2", "w1", "w2", "p1", "p2", "p11", "p12", "p22"},
                                             {"C1", "C2"});
  auto P = [&](const std::string& s) { return parse_expr(s, syms); };
  auto domain = [](double x0lo, double x0hi, double x1lo, double x1hi, double x2lo, double x2hi) {
    SampleDomain d;
    d.box = {{"x0", x0lo, x0hi}, {"x1", x1lo, x1hi}, {"x2", x2lo, x2hi}};
    d.constants = {{"C1", 0.5}, {"C2", 0.3}};
    d.seed = 4;
    return d;
  };
  std::vector<ReductionAnsatz> out;

  out.push_back({"item1", "P1+Q0", P("x0*x1"), {P("x0"), P("x2")}, P("p12^2 - p11*p22 + 1"),
                 {P("x0*x1 + x2^2/2 + x0^2/2 + C1*x0 + C2")}, domain(-1, 1, -1, 1, -1, 1)});

  const std::string r2 = "sqrt((x2^2 - x0^2)*(x2^2 - x0^2 + 4*C1))";
  const std::string l2 = "C1*ln(2*C1 + x2^2 - x0^2 + " + r2 + ")";
  std::vector<Expr> s2;
  for (const char* sg : {"-", "+"})
    s2.push_back(P("x1^2/2 " + std::string(sg) + " " + r2 + "/2 " + sg + " " + l2 + " - (x2^2 - x0^2)/2 + C2"));
  out.push_back({"item2", "P1+Q1", P("x1^2/2"), {P("x0"), P("x2")}, P("p12^2 - p11*p22 + p22 - p11"), s2,
                 domain(0, 0.5, -1, 1, 1, 2)});

  const std::string r3 = "sqrt((x0^2 - x2^2)*(x0^2 - x2^2 + 4*C1))";
  const std::string l3 = "C1*ln(2*C1 + x0^2 - x2^2 + " + r3 + ")";
  std::vector<Expr> s3;
  for (const char* sg : {"+", "-"})
    s3.push_back(P("-x1^2/2 " + std::string(sg) + " " + r3 + "/2 " + sg + " " + l3 + " - (x0^2 - x2^2)/2 + C2"));
  out.push_back({"item3", "J02", P("0"), {P("x0^2 - x2^2"), P("x1")},
                 P("w1*(p12^2 - p11*p22) + 2*w1*p1*p11 - p1*p22 + p1^2"), s3, domain(1, 2, -1, 1, 0, 0.5)});

  out.push_back({"item4", "J02+J12", P("0"), {P("x0 + x1"), P("x2^2 + x1^2 - x0^2")},
                 P("w1^2*(p12^2 - p11*p22) + 4*w2*p2*p22 + 4*w1*p2*p12 + 3*p2^2"),
                 {P("C1*sqrt(x2^2 + x1^2 - x0^2)/(x0 + x1)"), P("(C2*(x2^2 + x1^2 - x0^2) + C1)/(x0 + x1)")},
                 domain(-0.5, 0.5, 1, 2, 0.5, 1.5)});
  return out;
}

ReductionReport check_reduction(const ReductionAnsatz& r) {
  ReductionReport rep;
  bool reduced_ok = false;
  try {
    WorkLimit cap(kSymbolicWork);
    Expr lhs = ansatz_residual(r), rhs = on_x(r, r.reduced);
    if (auto q = try_simplify(lhs / rhs)) {
      rep.factor = *q;
      reduced_ok = jet_free(*q);
      if (!reduced_ok) rep.note = "Slid|ansatz / reduced depends on the jet of phi: " + render(*q);
      rep.method = Method::Symbolic;
    } else {
      throw std::runtime_error("budget");
    }
  } catch (const std::runtime_error&) {
    rep.method = Method::Sampled;
    reduced_ok = ratio_constant(r, rep.note);
  }
  bool sols = true;
  for (const auto& s : r.solutions) {
    Report sr = check_solution(pde(Equation::Slid), s, r.domain, 1e-8);
    sols = sols && sr.pass;
    rep.solutions.push_back(sr);
  }
  if (!sols) rep.note += (rep.note.empty() ? "" : "; ") + std::string("a listed solution fails check_solution");
  rep.pass = reduced_ok && sols;
  return rep;
}

std::vector<SymOpLin> linear_heat_generators(std::optional<Expr> b) {
  std::vector<SymOpLin> out;
  for (LinOp op : {LinOp::P0, LinOp::P1, LinOp::I, LinOp::D, LinOp::G, LinOp::F})
    out.push_back(linear_heat_operator(op));
  out.push_back(linear_heat_operator(LinOp::S, b ? *b : num(1)));
  return out;
}

}  // namespace nlsym
