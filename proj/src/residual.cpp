#include "nlsym/residual.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nlsym/calculus.hpp"
#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

using Pair = std::pair<int, int>;

// Derivative slots each residual actually reads.
struct Needs {
  std::vector<int> first;
  std::vector<Pair> second;
};

Needs needs(Equation eq) {
  switch (eq) {
    case Equation::Burgers:
    case Equation::NLHeat:
      return {{0, 1}, {{1, 1}}};
    case Equation::LinHeat:
      return {{0}, {{1, 1}}};
    case Equation::DAlembert:
      return {{}, {{0, 0}, {1, 1}, {2, 2}}};
    case Equation::Slid:
      return {{}, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
  }
  return {};
}

std::size_t arity(Equation eq) { return eq == Equation::DAlembert || eq == Equation::Slid ? 3 : 2; }

void check_vars(const PDESpec& spec, const Expr& u) {
  for (const auto& v : free_variables(u))
    if (std::find(spec.vars.begin(), spec.vars.end(), v) == spec.vars.end())
      throw std::invalid_argument(std::string("variable '") + v + "' is not an independent variable of " +
                                  equation_name(spec.id));
}

Expr derivative(const Expr& u, const std::vector<std::string>& path, bool simplified) {
  if (simplified) {
    try {
      return differentiate(u, path);
    } catch (const std::runtime_error&) {
    }
  }
  Expr d = u;
  for (const auto& v : path) d = differentiate_raw(d, v);
  return d;
}

template <class T>
Jet<T> zero_jet(const T& z) {
  Jet<T> j{z, {z, z, z}, {}};
  for (auto& row : j.dd) row = {z, z, z};
  return j;
}

Jet<Expr> symbolic_jet(const PDESpec& spec, const Expr& u, bool simplified) {
  Jet<Expr> j = zero_jet(Expr::integer(0));
  j.u = u;
  Needs n = needs(spec.id);
  for (int k : n.first) j.d[k] = derivative(u, {spec.vars[k]}, simplified);
  for (auto [a, b] : n.second) {
    j.dd[a][b] = derivative(u, {spec.vars[a], spec.vars[b]}, simplified);
    j.dd[b][a] = j.dd[a][b];
  }
  return j;
}

}  // namespace

const char* equation_name(Equation eq) {
  switch (eq) {
    case Equation::Burgers: return "burgers";
    case Equation::NLHeat: return "nlheat";
    case Equation::LinHeat: return "linheat";
    case Equation::DAlembert: return "dalembert";
    case Equation::Slid: return "slid";
  }
  return "?";
}

Equation equation_from_name(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Equation e : {Equation::Burgers, Equation::NLHeat, Equation::LinHeat, Equation::DAlembert, Equation::Slid})
    if (s == equation_name(e)) return e;
  throw std::invalid_argument("unknown equation '" + name + "' (burgers|nlheat|linheat|dalembert|slid)");
}

PDESpec pde(Equation id) {
  switch (id) {
    case Equation::Burgers:
    case Equation::NLHeat:
      return {id, {"x0", "x1"}};
    case Equation::LinHeat:
      return {id, {"y0", "y1"}};
    case Equation::DAlembert:
      return {id, {"y0", "y1", "y2"}};
    case Equation::Slid:
      return {id, {"x0", "x1", "x2"}};
  }
  return {id, {}};
}

PDESpec pde(Equation id, std::vector<std::string> vars) {
  if (vars.size() != arity(id))
    throw std::invalid_argument(std::string(equation_name(id)) + " needs " + std::to_string(arity(id)) + " variables");
  return {id, std::move(vars)};
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Symbolic: return "symbolic";
    case Method::Sampled: return "sampled";
    case Method::FiniteDifference: return "finite-difference";
  }
  return "?";
}

Expr residual_template(const PDESpec& spec) {
  Jet<Expr> j = zero_jet(Expr::integer(0));
  j.u = Expr::variable("u");
  std::size_t n = arity(spec.id);
  for (std::size_t a = 0; a < n; ++a) {
    j.d[a] = Expr::variable("u" + std::to_string(a));
    for (std::size_t b = a; b < n; ++b) {
      j.dd[a][b] = Expr::variable("u" + std::to_string(a) + std::to_string(b));
      j.dd[b][a] = j.dd[a][b];
    }
  }
  return residual_value(spec.id, j);
}

Expr residual(const PDESpec& spec, const Expr& u) {
  check_vars(spec, u);
  WorkLimit cap(kSymbolicWork);
  Expr r = residual_value(spec.id, symbolic_jet(spec, u, true));
  try {
    if (auto s = try_simplify(r)) return *s;
  } catch (const std::domain_error&) {
  }
  return r;
}

std::string report_json(const Report& r, int indent) {
  nlohmann::json j;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["max_residual"] = r.max_residual;
  j["max_abs_residual"] = r.max_abs_residual;
  nlohmann::json at = nlohmann::json::object();
  for (const auto& [k, v] : r.argmax) {
    if (v.imag() == 0.0)
      at[k] = v.real();
    else
      at[k] = {v.real(), v.imag()};
  }
  j["argmax"] = at;
  j["samples"] = r.samples;
  j["rejected"] = r.rejected;
  j["method"] = method_name(r.method);
  j["tolerance"] = r.tolerance;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(indent);
}

Report check_solution(const PDESpec& spec, const Expr& u, const SampleDomain& domain, double tol) {
  return check_solution(spec, u, domain, tol, CheckOptions{});
}

Report check_solution(const PDESpec& spec, const Expr& u, const SampleDomain& domain, double tol,
                      const CheckOptions& opt) {
  check_vars(spec, u);
  Report rep;
  rep.tolerance = tol;
  if (opt.symbolic) {
    WorkLimit cap(kSymbolicWork);
    try {
      if (simplifies_to_zero(residual_value(spec.id, symbolic_jet(spec, u, true)))) {
        rep.pass = true;
        rep.method = Method::Symbolic;
        return rep;
      }
    } catch (const std::exception&) {
      // fall through to sampling
    }
  }

  rep.method = Method::Sampled;
  Jet<Expr> sj = symbolic_jet(spec, u, false);
  Needs n = needs(spec.id);
  std::vector<Bindings> pts = domain.points(&rep.rejected);
  EvalOptions eo{domain.complex};

  struct Result {
    bool ok = false;
    double score = 0.0;
    double abs = 0.0;
  };
  std::vector<Result> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Bindings& p = pts[i];
    Jet<Complex> j = zero_jet(Complex(0.0));
    try {
      j.u = evaluate(sj.u, p, eo);
      for (int k : n.first) j.d[k] = evaluate(sj.d[k], p, eo);
      for (auto [a, b] : n.second) {
        j.dd[a][b] = evaluate(sj.dd[a][b], p, eo);
        j.dd[b][a] = j.dd[a][b];
      }
      if (spec.id == Equation::NLHeat && j.u == Complex(0.0)) return;
    } catch (const EvalError&) {
      return;
    }
    std::vector<Complex> t = residual_terms(spec.id, j);
    Complex sum = 0.0;
    double mag = 0.0;
    for (const auto& x : t) {
      sum += x;
      mag += std::abs(x);
    }
    if (!std::isfinite(mag)) return;
    res[i] = {true, std::abs(sum) / (1.0 + mag), std::abs(sum)};
  });

  bool any = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!res[i].ok) {
      ++rep.rejected;
      continue;
    }
    ++rep.samples;
    if (!any || res[i].score > rep.max_residual) {
      rep.max_residual = res[i].score;
      rep.argmax = pts[i];
    }
    rep.max_abs_residual = std::max(rep.max_abs_residual, res[i].abs);
    any = true;
  }
  if (!any) throw std::runtime_error("check_solution: all samples rejected");
  rep.pass = rep.max_residual <= tol;
  return rep;
}

GridFunction fd_residual(const PDESpec& spec, const GridFunction& g) {
  std::size_t dims = spec.vars.size();
  if (g.dims() != dims) throw std::invalid_argument("grid dimension does not match the equation");
  for (std::size_t k = 0; k < dims; ++k) {
    if (g.axes()[k].var != spec.vars[k])
      throw std::invalid_argument("grid axis " + std::to_string(k) + " is '" + g.axes()[k].var + "', expected '" +
                                  spec.vars[k] + "'");
    if (g.axes()[k].n < 5) throw std::invalid_argument("grid too small: axis " + spec.vars[k] + " needs n >= 5");
  }
  std::vector<Axis> inner = g.axes();
  for (auto& a : inner) {
    double h = a.h();
    a.min += h;
    a.max -= h;
    a.n -= 2;
  }
  GridFunction out(inner);
  std::vector<std::size_t> stride(dims, 1);
  for (std::size_t k = dims - 1; k-- > 0;) stride[k] = stride[k + 1] * g.axes()[k + 1].n;
  std::vector<double> h(dims);
  for (std::size_t k = 0; k < dims; ++k) h[k] = g.axes()[k].h();
  Needs n = needs(spec.id);
  const auto& v = g.values();

  std::size_t row = inner.back().n;
  parallel_for(out.size() / row, [&](std::size_t r) {
    for (std::size_t c = 0; c < row; ++c) {
      std::size_t oi = r * row + c;
      auto idx = out.index(oi);
      std::size_t gi = 0;
      for (std::size_t k = 0; k < dims; ++k) gi += (idx[k] + 1) * stride[k];
      Jet<double> j = zero_jet(0.0);
      j.u = v[gi];
      for (int k : n.first) j.d[k] = (v[gi + stride[k]] - v[gi - stride[k]]) / (2.0 * h[k]);
      for (auto [a, b] : n.second) {
        double d;
        if (a == b) {
          d = (v[gi + stride[a]] - 2.0 * v[gi] + v[gi - stride[a]]) / (h[a] * h[a]);
        } else {
          std::size_t sa = stride[a], sb = stride[b];
          d = (v[gi + sa + sb] - v[gi + sa - sb] - v[gi - sa + sb] + v[gi - sa - sb]) / (4.0 * h[a] * h[b]);
        }
        j.dd[a][b] = j.dd[b][a] = d;
      }
      double res = residual_value(spec.id, j);
      out[oi] = std::isfinite(res) ? res : std::numeric_limits<double>::quiet_NaN();
    }
  });
  return out;
}

Report grid_report(const GridFunction& r, double tol) {
  Report rep;
  rep.method = Method::FiniteDifference;
  rep.tolerance = tol;
  std::size_t at = r.size();
  rep.max_residual = rep.max_abs_residual = r.max_abs(&at);
  rep.rejected = r.masked();
  rep.samples = r.size() - rep.rejected;
  if (at < r.size()) rep.argmax = r.point(at);
  rep.pass = rep.samples > 0 && rep.max_residual <= tol;
  if (rep.samples == 0) rep.note = "every grid point is masked";
  return rep;
}

}  // namespace nlsym
