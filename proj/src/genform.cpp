#include "nlsym/genform.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "nlsym/calculus.hpp"
#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

const Expr X0 = Expr::variable("x0");
const Expr X1 = Expr::variable("x1");
const Expr Y0 = Expr::variable("y0");
const Expr Y1 = Expr::variable("y1");
const Expr V = Expr::variable("v");

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

Expr heat_to_x(const Expr& v) { return substitute(v, {{"y0", X0}, {"y1", X1}}); }

Expr require_nondegenerate(const Expr& formula_num, const Expr& den, const char* what) {
  if (vanishes_identically(den)) throw DegenerateSeed(std::string("degenerate seed: ") + what + " denominator vanishes identically");
  return tidy(formula_num);
}

}  // namespace

bool vanishes_identically(const Expr& e) {
  // Sampling first: a nonzero value settles it without any algebra.
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> pick(0.3, 1.7);
  std::size_t evaluated = 0;
  for (int i = 0; i < 20; ++i) {
    Bindings at;
    for (const auto& s : free_symbols(e)) at[s] = pick(rng);
    Complex val;
    try {
      val = evaluate(e, at, {true});
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(std::abs(val))) continue;
    ++evaluated;
    if (std::abs(val) > 1e-12) return false;
  }
  try {
    WorkLimit cap(kSymbolicWork);
    if (simplifies_to_zero(e)) return true;
  } catch (const std::exception&) {
  }
  return evaluated > 0;
}

const char* lin_op_name(LinOp op) {
  switch (op) {
    case LinOp::P0: return "P0";
    case LinOp::P1: return "P1";
    case LinOp::I: return "I";
    case LinOp::D: return "D";
    case LinOp::G: return "G";
    case LinOp::F: return "F";
    case LinOp::S: return "S";
  }
  return "?";
}

SymOpLin linear_heat_operator(LinOp op, std::optional<Expr> b) {
  switch (op) {
    case LinOp::P0: return {op, num(1), num(0), num(0)};
    case LinOp::P1: return {op, num(0), num(1), num(0)};
    case LinOp::I: return {op, num(0), num(0), V};
    case LinOp::D: return {op, num(2) * Y0, Y1, num(0)};
    case LinOp::G: return {op, num(0), Y0, -(frac(1, 2) * Y1 * V)};
    case LinOp::F: return {op, pow(Y0, 2), Y0 * Y1, -(frac(1, 4) * (pow(Y1, 2) + num(2) * Y0) * V)};
    case LinOp::S: {
      if (!b) throw std::invalid_argument("operator S needs a heat solution b");
      for (const auto& s : free_variables(*b))
        if (s != "y0" && s != "y1") throw std::invalid_argument("b must depend on y0, y1 only");
      if (!vanishes_identically(residual(pde(Equation::LinHeat), *b)))
        throw std::invalid_argument("b = " + render(*b) + " does not solve b0 = b11");
      return {op, num(0), num(0), *b};
    }
  }
  throw std::invalid_argument("unknown operator");
}

Expr characteristic(const SymOpLin& op, const Expr& v) {
  Expr eta = substitute(op.eta, {{"v", v}});
  return tidy(eta - op.xi0 * d(v, "y0") - op.xi1 * d(v, "y1"));
}

Expr apply_linear_symmetry(const SymOpLin& op, const Expr& v) { return tidy(-characteristic(op, v)); }

Expr apply_linear_symmetry(const std::vector<SymOpLin>& ops, const Expr& v) {
  std::vector<Expr> terms;
  for (const auto& op : ops) terms.push_back(-characteristic(op, v));
  return tidy(Expr::sum(terms));
}

Expr cole_hopf(const Expr& v) {
  Expr w = heat_to_x(v);
  if (vanishes_identically(w)) throw std::invalid_argument("cole_hopf: v vanishes identically");
  return tidy(num(-2) * d(w, "x1") / w);
}

Expr shift_generate(const Expr& v, const Expr& r) {
  Expr w = heat_to_x(v);
  Expr den = w + r;
  if (vanishes_identically(den)) throw std::invalid_argument("shift_generate: v + r vanishes identically");
  return tidy(num(-2) * d(w, "x1") / den);
}

Expr gen_burgers_P0(const Expr& u) {
  Expr u0 = d(u, "x0"), u1 = d(u, "x1");
  Expr den = -(frac(1, 2) * u1) + frac(1, 4) * pow(u, 2);
  return require_nondegenerate(u + u0 / den, den, "thm1");
}

Expr gen_burgers_P0P1(const Expr& u) {
  Expr u0 = d(u, "x0"), u1 = d(u, "x1");
  Expr den = u1 - frac(1, 2) * pow(u, 2) + u;
  return require_nondegenerate(u - num(2) * (u0 + u1) / den, den, "thm2");
}

Expr gen_burgers_D(const Expr& u) {
  Expr u0 = d(u, "x0"), u1 = d(u, "x1");
  Expr den = -(X0 * (u1 - frac(1, 2) * pow(u, 2))) - frac(1, 2) * X1 * u;
  return require_nondegenerate(u + (num(2) * X0 * u0 + u + X1 * u1) / den, den, "thm4");
}

ParametricSolution gen_nlheat_P0P1(const Expr& u) {
  ParametricSolution p;
  Expr ut = substitute(u, {{"x1", Expr::variable(p.param)}});
  Expr uT = d(ut, p.param), u0 = d(ut, "x0");
  Expr bracket = pow(uT, 2) - u0 * pow(ut, 3) - uT * pow(ut, 2);
  if (vanishes_identically(bracket)) throw DegenerateSeed("degenerate seed: thm3 bracket vanishes identically");
  p.value = tidy(pow(ut, 5) / bracket);
  p.constraint = tidy(-(uT * pow(ut, -3)) + pow(ut, -1));
  return p;
}

std::vector<Expr> eliminate(const ParametricSolution& p) {
  auto [n, dd] = numer_denom(p.constraint);
  Expr poly = tidy(n - X1 * dd);
  auto c = polynomial_coefficients(poly, p.param);
  std::vector<Expr> out;
  if (!c) return out;
  auto put = [&](const Expr& root) { out.push_back(tidy(substitute(p.value, {{p.param, root}}))); };
  if (c->size() == 2 && !c->at(1).is_zero()) {
    put(tidy(-(*c)[0] / (*c)[1]));
  } else if (c->size() == 3 && !c->at(2).is_zero()) {
    Expr disc = tidy(pow((*c)[1], 2) - num(4) * (*c)[2] * (*c)[0]);
    for (int s : {1, -1})
      put(tidy((-(*c)[1] + num(s) * sqrt(disc)) / (num(2) * (*c)[2])));
  }
  return out;
}

GridFunction sample_parametric(const ParametricSolution& p, const std::vector<Axis>& axes, const Bindings& constants) {
  if (axes.size() != 2 || axes[0].var != "x0" || axes[1].var != "x1")
    throw std::invalid_argument("sample_parametric needs axes x0, x1");
  std::vector<std::string> slots{"x0", p.param};
  CompiledExpr X(p.constraint, slots, constants);
  CompiledExpr dX(d(p.constraint, p.param), slots, constants);
  CompiledExpr U(p.value, slots, constants);
  GridFunction g(axes, std::numeric_limits<double>::quiet_NaN());
  const std::size_t scan = 400;

  parallel_for(axes[0].n, [&](std::size_t i) {
    double x0 = axes[0].at(i);
    auto F = [&](double s) { return X(std::vector<double>{x0, s}); };
    auto dF = [&](double s) { return dX(std::vector<double>{x0, s}); };
    std::optional<double> prev;
    for (std::size_t j = 0; j < axes[1].n; ++j) {
      double x1 = axes[1].at(j);
      std::optional<double> root;
      if (prev) {
        double s = *prev;
        for (int it = 0; it < 50; ++it) {
          double f = F(s) - x1, df = dF(s);
          if (!std::isfinite(f) || !std::isfinite(df) || df == 0.0) break;
          double step = f / df;
          s -= step;
          if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(s))) {
            if (s >= p.lo && s <= p.hi) root = s;
            break;
          }
        }
      }
      if (!root) {
        double best_gap = std::numeric_limits<double>::infinity();
        double a = p.lo, fa = F(a) - x1;
        for (std::size_t k = 1; k <= scan; ++k) {
          double b = p.lo + (p.hi - p.lo) * static_cast<double>(k) / scan, fb = F(b) - x1;
          if (std::isfinite(fa) && std::isfinite(fb) && (fa == 0.0 || fa * fb < 0.0)) {
            double r = a;
            if (fa != 0.0) {
              boost::uintmax_t iters = 200;
              auto br = boost::math::tools::toms748_solve([&](double s) { return F(s) - x1; }, a, b, fa, fb,
                                                          boost::math::tools::eps_tolerance<double>(52), iters);
              r = 0.5 * (br.first + br.second);
            }
            double gap = prev ? std::fabs(r - *prev) : 0.0;
            if (gap < best_gap) {
              best_gap = gap;
              root = r;
            }
            if (!prev) break;
          }
          a = b;
          fa = fb;
        }
      }
      if (!root) continue;
      if (!(std::fabs(dF(*root)) > 1e-12)) continue;
      prev = root;
      double val = U(std::vector<double>{x0, *root});
      if (std::isfinite(val)) g[g.flat({i, j})] = val;
    }
  });
  return g;
}

ParametricSolution storm_forward(const Expr& v) {
  Expr w = substitute(v, {{"y0", X0}});
  Expr v1 = d(w, "y1");
  if (vanishes_identically(v1)) throw std::invalid_argument("storm_forward: v1 vanishes identically");
  ParametricSolution p;
  p.param = "y1";
  p.value = tidy(num(1) / v1);
  p.constraint = tidy(w);
  return p;
}

const char* generator_name(Generator g) {
  switch (g) {
    case Generator::Thm1: return "thm1";
    case Generator::Thm2: return "thm2";
    case Generator::Thm3: return "thm3";
    case Generator::Thm4: return "thm4";
  }
  return "?";
}

Generator generator_from_name(const std::string& name) {
  for (Generator g : {Generator::Thm1, Generator::Thm2, Generator::Thm3, Generator::Thm4})
    if (name == generator_name(g)) return g;
  throw std::invalid_argument("unknown generator '" + name + "' (thm1|thm2|thm3|thm4)");
}

Expr generate(Generator g, const Expr& u) {
  switch (g) {
    case Generator::Thm1: return gen_burgers_P0(u);
    case Generator::Thm2: return gen_burgers_P0P1(u);
    case Generator::Thm4: return gen_burgers_D(u);
    case Generator::Thm3: {
      auto branches = eliminate(gen_nlheat_P0P1(u));
      if (branches.size() != 1)
        throw std::runtime_error("thm3 output of " + render(u) +
                                 " has no single explicit form; sample it with sample_parametric");
      return branches[0];
    }
  }
  throw std::invalid_argument("unknown generator");
}

ChainResult chain(Generator g, const Expr& seed, std::size_t n, const ChainOptions& opt) {
  ChainResult res;
  PDESpec spec = pde(g == Generator::Thm3 ? Equation::NLHeat : Equation::Burgers);
  auto verify = [&](const Expr& e) {
    if (!opt.verify) return;
    try {
      res.reports.push_back(check_solution(spec, e, opt.domain, opt.tol));
    } catch (const std::exception& ex) {
      Report r;
      r.tolerance = opt.tol;
      r.method = Method::Sampled;
      r.note = ex.what();
      res.reports.push_back(r);
    }
  };
  res.elements.push_back(seed);
  verify(seed);
  for (std::size_t i = 1; i <= n; ++i) {
    try {
      res.elements.push_back(generate(g, res.elements.back()));
    } catch (const std::exception& ex) {
      res.stopped_at = i;
      res.message = "step " + std::to_string(i) + ": " + ex.what();
      break;
    }
    verify(res.elements.back());
  }
  return res;
}

}  // namespace nlsym
