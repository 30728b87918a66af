// Acceptance criteria, one verdict line each. `acceptance --criterion N` runs
// one criterion (8a and 8b select the halves of criterion 8); the exit code is
// 0 only when every selected criterion passes.

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "nlsym/calculus.hpp"
#include "nlsym/catalog.hpp"
#include "nlsym/genform.hpp"
#include "nlsym/legendre.hpp"
#include "nlsym/simplify.hpp"
#include "nlsym/superpose.hpp"
#include "nlsym/symmetry.hpp"

using namespace nlsym;

namespace {

constexpr double kEquivTol = 1e-10;      // 1: printed chain elements
constexpr std::size_t kEquivPoints = 100;
constexpr double kSolutionTol = 1e-8;    // 3, 5, 6: check_solution
constexpr double kFitTol = 1e-9;         // 3: composites after the weight fit
constexpr double kNLHeatTol = 1e-6;      // 4: numeric vs closed form
constexpr double kFDTol = 1e-3;          // 4, 8: finite-difference residual
constexpr double kInvolutionTol = 1e-8;  // 7
constexpr double kOracleTol = 1e-9;      // 9
constexpr double kDerivTol = 1e-6;       // 10: relative, central difference h = 1e-5
constexpr double kLambertTol = 1e-12;    // 10

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;  // details, printed indented

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void info(const std::string& what) { lines.push_back("info  " + what); }
};

template <class... T>
std::string str(const T&... parts) {
  std::ostringstream s;
  (s << ... << parts);
  return s.str();
}

const SymbolTable kSyms =
    SymbolTable::with({"x0", "x1", "x2", "y0", "y1", "y2"}, {"C", "C1", "C2", "k", "a"});

Expr P(const std::string& s) { return parse_expr(s, kSyms); }

const Catalog& corpus() {
  static const Catalog c = Catalog::builtin();
  return c;
}

// ---- 1 ----
Outcome chains() {
  Outcome o;
  const Catalog& c = corpus();
  for (const char* g : {"thm1", "thm2", "thm4"}) {
    Generator gen = generator_from_name(g);
    for (const SolutionRecord* seed : c.with_tag(g)) {
      if (!seed->has_tag("step0")) continue;
      std::string prefix = seed->id.substr(0, seed->id.size() - 1);
      std::size_t n = 1;
      while (c.find(prefix + std::to_string(n))) ++n;
      ChainResult ch = chain(gen, seed->expr, n - 1);
      if (ch.elements.size() != n) {
        o.check(false, str(seed->id, ": chain stopped: ", ch.message));
        continue;
      }
      int matched = 0, printed = 0;
      for (std::size_t k = 1; k < n; ++k) {
        const SolutionRecord& r = c.get(prefix + std::to_string(k));
        SampleDomain d = r.sample_domain(kEquivPoints, 1000 + k);
        d.exclude.push_back({P("x0"), ConstraintKind::NonZero, 1e-6});
        d.exclude.push_back({P("2*x0 - x1^2"), ConstraintKind::NonZero, 1e-6});
        EquivalenceReport e = equivalent(ch.elements[k], r.expr, d, kEquivTol);
        if (r.suspect) {
          o.info(str(r.id, " (suspect, reported): ", e.pass ? "matches" : "differs", ", worst error ", e.worst_error));
          continue;
        }
        ++printed;
        if (e.pass)
          ++matched;
        else
          o.check(false, str(r.id, ": worst error ", e.worst_error, " at ", describe_point(e.worst_point)));
      }
      o.check(matched == printed, str(prefix.substr(0, prefix.size() - 5), ": ", matched, "/", printed,
                                      " printed successors reproduced"));
    }
  }
  // the suspect element with the numerator term corrected
  const SolutionRecord& s = c.get("thm2.chain4.step1");
  Expr fixed = P("-(-6*x0*x1 + x1^3 - 2*x1^2*x0 + 4*x0^2)/(x0*(2*x0 - x1^2 + 2*x1*x0))");
  o.check(equivalent(generate(Generator::Thm2, P("x1/x0")), fixed, s.sample_domain(kEquivPoints, 7), kEquivTol).pass,
          "thm2.chain4.step1 with 4*x0 read as 4*x0^2 equals the generated element");
  return o;
}

// ---- 2 ----
Outcome fixed_points() {
  Outcome o;
  Expr img = generate(Generator::Thm3, P("-1/(C1*x1 + C2)"));
  o.check(simplifies_to_zero(img - P("-1/(C1*x1)")), str("thm3: -1/(C1*x1 + C2) -> ", render(img)));
  Expr d = generate(Generator::Thm4, P("x1/x0"));
  o.check(simplifies_to_zero(d - P("x1/x0")), str("thm4: x1/x0 -> ", render(d)));
  return o;
}

// ---- 3 ----
Outcome burgers_superposition() {
  Outcome o;
  const Catalog& c = corpus();
  struct Case {
    const char* id;
    const char* u1;
    const char* u2;
  };
  // example 3 uses the Burgers solution behind its potential; the literal
  // second input is a separate suspect record
  const Case cases[] = {{"burgers.superpose.ex1", "x1/x0", "1 + 2/(x0 - x1)"},
                        {"burgers.superpose.ex2", "x1/x0", "-1 - 2*tanh(x0 + x1)"},
                        {"burgers.superpose.ex3", "x1/x0", "2/(exp(-x0 - x1) - 1)"}};
  for (const auto& cs : cases) {
    const SolutionRecord& r = c.get(cs.id);
    SampleDomain d = r.sample_domain();
    d.complex = true;
    Potential p1 = burgers_potential(P(cs.u1)), p2 = burgers_potential(P(cs.u2));
    Bindings at = r.constants;
    at["x0"] = 0.7;
    at["x1"] = 0.45;
    std::complex<double> ratio = fit_weight_ratio(p1, p2, r.expr, at);
    Expr ours = burgers_superpose(p1, p2, Expr::integer(1), Expr::constant("K"));
    SampleDomain dk = d;
    dk.constants["K"] = ratio;
    EquivalenceReport e = equivalent(ours, r.expr, dk, kFitTol);
    o.check(e.pass, str(cs.id, ": reproduced after the weight fit (ratio ", ratio, "), worst error ", e.worst_error));
    Report rep = check_solution(pde(Equation::Burgers), r.expr, d, kSolutionTol);
    o.check(rep.pass, str(cs.id, ": printed composite solves Burgers (", method_name(rep.method), ", ",
                          rep.max_residual, ")"));
  }
  RecordResult lit = verify_record(c.get("burgers.superpose.input.3.printed"));
  o.info(str("burgers.superpose.input.3.printed (suspect, reported): ", lit.pass ? "passes" : "fails",
             ", residual ", lit.report.max_residual));
  return o;
}

// ---- 4 ----
Outcome nlheat_superposition() {
  Outcome o;
  std::vector<Axis> ax{{"x0", 0.0, 1.0, 101}, {"x1", 0.5, 3.0, 251}};
  auto r = nlheat_superpose(P("-1/x1"), P("-1/(2*x1)"), ax, {0.5, {0.4}});
  // one-point fit of C1 at (x0, x1) = (0, 0.5): w = -1/(2 x1 u + 1), C1 = (w^2 - 1)/(4 x1)
  double u = r.u[0], w = -1.0 / (2 * 0.5 * u + 1), c1 = (w * w - 1) / (4 * 0.5);
  GridFunction ref = GridFunction::sample(corpus().get("nlheat.superpose.sqrt").expr, ax, {{"C1", c1}});
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::fabs(ref[i] - r.u[i]));
  o.check(worst < kNLHeatTol, str("(-1/x1, -1/(2 x1)) vs printed sqrt composite, C1 = ", c1, ": max diff ", worst));

  const SolutionRecord& lw = corpus().get("nlheat.superpose.lambertw");
  GridFunction g = GridFunction::sample(lw.expr, ax, lw.constants);
  Report fd = grid_report(fd_residual(pde(Equation::NLHeat), g), kFDTol);
  o.check(fd.pass && g.masked() == 0,
          str("LambertW composite (C = 1, C1 = 6): FD residual ", fd.max_residual, ", masked ", g.masked()));
  return o;
}

// ---- 5 ----
Outcome slid_invariance() {
  Outcome o;
  const Catalog& c = corpus();
  for (const char* id : {"slid.reduction1", "slid.reduction4.radical", "slid.reduction4.rational"}) {
    const SolutionRecord& r = c.get(id);
    int ok = 0;
    for (const auto& op : slid_generators()) {
      InvarianceReport inv = infinitesimal_check(op, r.expr, r.sample_domain());
      if (inv.pass)
        ++ok;
      else
        o.check(false, str(id, " ", op.name, ": ", inv.note));
    }
    o.check(ok == 12, str(id, ": ", ok, "/12 generators"));
  }
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> small(-0.15, 0.15);
  std::uniform_int_distribution<int> kind(0, 6);
  int total = 0, passed = 0;
  auto slid = c.for_equation(Equation::Slid);
  for (int n = 0; n < 30; ++n) {
    GroupKind k = static_cast<GroupKind>(kind(rng));
    std::vector<Expr> params;
    for (std::size_t i = 0; i < group_param_count(k); ++i) params.push_back(Expr::flt(small(rng)));
    for (const SolutionRecord* r : slid) {
      ++total;
      Expr g = apply_group_transform({k, params}, r->expr);
      Report rep;
      try {
        rep = check_solution(pde(Equation::Slid), g, r->sample_domain(), kSolutionTol, CheckOptions{false});
      } catch (const std::exception& e) {
        rep.note = e.what();
      }
      if (rep.pass)
        ++passed;
      else
        o.check(false, str(group_kind_name(k), " on ", r->id, ": ", rep.max_residual, " ", rep.note));
    }
  }
  o.check(passed == total, str("group action: ", passed, "/", total, " transformed catalog solutions verified"));
  return o;
}

// ---- 6 ----
Outcome reductions() {
  Outcome o;
  auto rs = slid_reductions();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    ReductionReport rep = check_reduction(rs[i]);
    if (i == 0)
      o.check(rep.method == Method::Symbolic && rep.factor == Expr::integer(1) && rep.pass,
              str(rs[i].id, ": substituted residual equals the reduced equation exactly"));
    else
      o.check(rep.pass, str(rs[i].id, ": reduced equation (factor ", render(rep.factor), ", ",
                            method_name(rep.method), ")"));
    for (std::size_t k = 0; k < rep.solutions.size(); ++k)
      o.check(rep.solutions[k].pass,
              str(rs[i].id, " solution ", k, ": ", method_name(rep.solutions[k].method), " residual ",
                  rep.solutions[k].max_residual));
  }
  return o;
}

// ---- 7, 8 ----
Rational rnd(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(-6, 6), d(1, 4);
  return Rational(n(rng), d(rng));
}

RatMat3 random_symmetric(std::mt19937_64& rng) {
  RatMat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = rnd(rng);
  return m;
}

RatMat3 random_wave_hessian(std::mt19937_64& rng) {
  for (;;) {
    RatMat3 b = random_symmetric(rng);
    b[0][0] = b[1][1] + b[2][2];
    if (det(b) != 0) return b;
  }
}

Expr quad(const RatMat3& a, const Vars3& v, const std::array<Rational, 3>& b, Rational c = 0) {
  return quadratic_expr({a, {Expr::number(b[0]), Expr::number(b[1]), Expr::number(b[2])}, Expr::number(c)}, v);
}

std::vector<Axis> cube(const Vars3& v, double lo, double hi, std::size_t n) {
  return {{v[0], lo, hi, n}, {v[1], lo, hi, n}, {v[2], lo, hi, n}};
}

Outcome legendre() {
  Outcome o;
  Expr v = P("y0^2 + y1^2/2 + y2^2/2 + cos(y0 + y1)/20 + y1*y2/10");
  ExprField fv(v, kYVars);
  LegendreField u(fv);
  auto ax = cube(kYVars, -0.8, 0.8, 9);
  GridFunction back = legendre_numeric(u, ax);
  GridFunction ref = GridFunction::sample(v, ax);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::fabs(back[i] - ref[i]));
  o.check(worst < kInvolutionTol && back.masked() == 0, str("involution L(L(v)) = v: max diff ", worst));

  std::mt19937_64 rng(50);
  int exact = 0;
  for (int k = 0; k < 50; ++k) {
    Expr w = quad(random_wave_hessian(rng), kYVars, {rnd(rng), rnd(rng), rnd(rng)}, rnd(rng));
    if (simplifies_to_zero(residual(pde(Equation::DAlembert), w)) &&
        simplifies_to_zero(residual(pde(Equation::Slid), legendre_quadratic(w))))
      ++exact;
  }
  o.check(exact == 50, str(exact, "/50 quadratic wave solutions map to exact Slid solutions"));

  std::mt19937_64 mr(100);
  int checked = 0, agree = 0;
  while (checked < 100) {
    RatMat3 m = random_symmetric(mr);
    Rational dm = det(m);
    if (dm == 0) continue;
    ++checked;
    RatMat3 inv = hessian_map(m);
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Rational s = 0;
        for (int k = 0; k < 3; ++k) s += m[i][k] * inv[k][j];
        ok = ok && s == (i == j ? 1 : 0);
      }
    const auto& a = m;
    ok = ok && inv[0][0] == (a[1][1] * a[2][2] - a[1][2] * a[1][2]) / dm;
    ok = ok && inv[0][1] == -(a[0][1] * a[2][2] - a[2][0] * a[1][2]) / dm;
    ok = ok && inv[1][1] == (a[0][0] * a[2][2] - a[2][0] * a[2][0]) / dm;
    ok = ok && inv[0][2] == (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / dm;
    if (ok) ++agree;
  }
  o.check(agree == 100, str("hessian_map vs cofactor display (u00, u01, u11, u02), exact: ", agree, "/100"));
  return o;
}

Outcome quadratic_pairs() {
  Outcome o;
  std::mt19937_64 rng(8);
  int exact = 0, pairs = 0;
  while (pairs < 10) {
    Expr u1 = legendre_quadratic(quad(random_wave_hessian(rng), kYVars, {rnd(rng), rnd(rng), 0}));
    Expr u2 = legendre_quadratic(quad(random_wave_hessian(rng), kYVars, {0, rnd(rng), rnd(rng)}, rnd(rng)));
    Expr u3;
    try {
      u3 = slid_superpose_quadratic(u1, u2);
    } catch (const std::domain_error&) {
      continue;
    }
    ++pairs;
    Expr oracle = legendre_quadratic(legendre_quadratic(u1) + legendre_quadratic(u2));
    if (simplifies_to_zero(u3 - oracle)) ++exact;
  }
  o.check(exact == pairs, str("quadratic closed form = Legendre-sum oracle: ", exact, "/", pairs, " pairs"));
  return o;
}

Outcome printed_pair() {
  Outcome o;
  const SolutionRecord& r1 = corpus().get("slid.pair.u1");
  const SolutionRecord& r2 = corpus().get("slid.pair.u2");
  NewtonOptions opt;
  opt.constants = r1.constants;
  opt.guess = Vec3(1.0, 0.8, 1.2);
  std::vector<Axis> ax{{"x0", -0.1, 0.1, 11}, {"x1", 2.2, 2.4, 11}, {"x2", 1.1, 1.3, 11}};
  try {
    SlidSuperposition s = slid_superpose(r1.expr, r2.expr, ax, opt);
    Report fd = grid_report(fd_residual(pde(Equation::Slid), s.u), kFDTol);
    o.check(fd.pass, str("printed pair composite: FD residual ", fd.max_residual, ", masked ", s.u.masked()));
  } catch (const NewtonError& e) {
    o.check(false, str("printed pair composite: ", e.what()));
    ExprField f1(r1.expr, kXVars, r1.constants), f2(r2.expr, kXVars, r2.constants);
    Eigen::SelfAdjointEigenSolver<Mat3> e1(f1.hessian(Vec3(-1.0, 1.5, 0.0))), e2(f2.hessian(Vec3(1.0, 0.8, 1.2)));
    o.info(str("Hessian eigenvalues u1 ", e1.eigenvalues().transpose(), "; u2 ", e2.eigenvalues().transpose(),
               " (rank one each, so H1 + H2 is singular)"));
  }
  return o;
}

// ---- 9 ----
Expr random_heat_solution(std::mt19937_64& rng) {
  const char* basis[] = {"1", "y1", "y1^2 + 2*y0", "y1^3 + 6*y0*y1", "y1^4 + 12*y0*y1^2 + 12*y0^2"};
  const char* waves[] = {"exp(y0 + y1)", "exp(y0 - y1)", "exp(4*y0 + 2*y1)", "exp(y0/4 + y1/2)", "exp(4*y0 - 2*y1)"};
  std::uniform_int_distribution<int> coef(-3, 3), pick(0, 4);
  std::vector<Expr> terms;
  for (const char* b : basis) {
    int c = coef(rng);
    if (c != 0) terms.push_back(Expr::integer(c) * P(b));
  }
  int c = coef(rng);
  terms.push_back(Expr::integer(c == 0 ? 1 : c) * P(waves[pick(rng)]));
  return Expr::sum(terms);
}

Outcome oracle_commutation() {
  Outcome o;
  std::mt19937_64 rng(2024);
  auto P0 = linear_heat_operator(LinOp::P0), P1 = linear_heat_operator(LinOp::P1), D = linear_heat_operator(LinOp::D);
  auto to_x = [](const Expr& v) { return substitute(v, {{"y0", Expr::variable("x0")}, {"y1", Expr::variable("x1")}}); };
  int checked[3] = {0, 0, 0}, agreed[3] = {0, 0, 0};
  for (int i = 0; i < 50; ++i) {
    Expr v = random_heat_solution(rng);
    Expr u = cole_hopf(v);
    std::pair<Generator, Expr> routes[] = {{Generator::Thm1, apply_linear_symmetry(P0, v)},
                                           {Generator::Thm2, apply_linear_symmetry({P0, P1}, v)},
                                           {Generator::Thm4, apply_linear_symmetry(D, v)}};
    for (int k = 0; k < 3; ++k) {
      const auto& [g, image] = routes[k];
      if (vanishes_identically(image)) continue;
      SampleDomain dom;
      dom.box = {{"x0", 0.2, 1.0}, {"x1", 0.2, 1.0}};
      dom.seed = 100 + i;
      // |u| < 20: near poles of u the direct formula cancels terms of size u^2
      dom.exclude = {{to_x(v), ConstraintKind::NonZero, 1e-3},
                     {to_x(image), ConstraintKind::NonZero, 1e-3},
                     {Expr::integer(400) - pow(u, 2), ConstraintKind::Positive, 0.0}};
      ++checked[k];
      EquivalenceReport e = equivalent(generate(g, u), cole_hopf(image), dom, kOracleTol);
      if (e.pass)
        ++agreed[k];
      else
        o.check(false, str(generator_name(g), " on v = ", render(v), ": worst error ", e.worst_error));
    }
  }
  const char* names[] = {"thm1", "thm2", "thm4"};
  for (int k = 0; k < 3; ++k)
    o.check(agreed[k] == checked[k] && checked[k] >= 45,
            str(names[k], ": ", agreed[k], "/", checked[k], " heat solutions agree with the linear route"));
  return o;
}

// ---- 10 ----
const char* const kCorpus[] = {
    "x1/x0",
    "x1*(6*x0 - x1^2)/(x0*(2*x0 - x1^2))",
    "-2*(1 + 1/(x1 + 2*x0 + 3))",
    "-(13 + 14*tanh(x0 + x1))/(5 + 4*tanh(x0 + x1))",
    "2/(exp(-x0 - x1) - 1)",
    "x0^(-1/2)*exp(-(x1^2)/(4*x0))",
    "sqrt(x0^2 + x1^2)/(x0 + x1)",
    "lambertW(x1*exp(x0))",
    "ln(x0 + x1^2) - sinh(x1)*cosh(x0)",
    "(x0 - x1)^3/(x0 + 2*x1)^2 + x1^(3/2)",
    "sin(x0*x1) + cos(x1)^2",
    "x0^x1",
    "1/(1 + sqrt(x0 + x1))",
};

Outcome hygiene() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux0(0.5, 2.0), ux1(0.1, 0.6);
  const double h = 1e-5;
  int bad = 0, total = 0;
  for (const char* s : kCorpus) {
    Expr e = P(s);
    for (const char* v : {"x0", "x1"}) {
      Expr de = differentiate(e, v);
      for (int i = 0; i < 100; ++i) {
        Bindings at{{"x0", ux0(rng)}, {"x1", ux1(rng)}};
        Bindings lo = at, hi = at;
        lo[v] -= h;
        hi[v] += h;
        Complex fd = (evaluate(e, hi, {true}) - evaluate(e, lo, {true})) / (2 * h);
        Complex ex = evaluate(de, at, {true});
        ++total;
        if (std::abs(fd - ex) > kDerivTol * (1 + std::abs(ex))) ++bad;
      }
    }
  }
  o.check(bad == 0, str("derivative vs central difference: ", total - bad, "/", total));

  int idem = 0, round = 0, n = 0;
  for (const auto& ce : corpus().records()) {
    ++n;
    Expr e = ce.expr;
    SymbolTable syms = ce.symbols();
    if (parse_expr(render(e), syms) == e) ++round;
    std::optional<Expr> c;
    try {
      c = try_simplify(e);
    } catch (const std::domain_error&) {
      c = std::nullopt;
    }
    if (!c || simplify(*c) == *c) ++idem;
  }
  for (const char* s : kCorpus) {
    ++n;
    Expr e = P(s);
    if (P(render(e)) == e) ++round;
    auto c = try_simplify(e);
    if (!c || simplify(*c) == *c) ++idem;
  }
  o.check(round == n, str("parse(render(e)) == e: ", round, "/", n));
  o.check(idem == n, str("simplify idempotent: ", idem, "/", n));

  const double lo = -std::exp(-1.0) + 1e-6, hi = 10.0;
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double z = lo + (hi - lo) * i / 2000.0;
    double w = lambert_w0(z);
    worst = std::max(worst, std::fabs(w * std::exp(w) - z));
  }
  o.check(worst <= kLambertTol, str("W(z) e^W(z) = z on [-1/e + 1e-6, 10]: max error ", worst));
  return o;
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only;
  app.add_option("--criterion", only, "criterion id (1..10, 8a, 8b); repeatable");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {"1", "chain reproduction", chains},
      {"2", "fixed points", fixed_points},
      {"3", "Burgers superposition", burgers_superposition},
      {"4", "nonlinear heat superposition", nlheat_superposition},
      {"5", "Slid invariance", slid_invariance},
      {"6", "reductions", reductions},
      {"7", "Legendre transform", legendre},
      {"8a", "Slid superposition, quadratic pairs", quadratic_pairs},
      {"8b", "Slid superposition, printed pair", printed_pair},
      {"9", "oracle commutation", oracle_commutation},
      {"10", "core hygiene", hygiene},
  };
  auto selected = [&](const std::string& id) {
    if (only.empty()) return true;
    for (const auto& s : only)
      if (s == id || (s == "8" && id[0] == '8' && id.size() == 2)) return true;
    return false;
  };
  bool ok = true;
  int ran = 0;
  for (const auto& c : all) {
    if (!selected(c.id)) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, str("exception: ", e.what()));
    }
    ok = ok && o.pass;
    std::cout << "criterion " << c.id << " (" << c.title << "): " << (o.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& l : o.lines) std::cout << "    " << l << "\n";
    std::cout.flush();
  }
  if (ran == 0) {
    std::cerr << "no criterion matches\n";
    return 2;
  }
  return ok ? 0 : 1;
}
