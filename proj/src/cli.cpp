#include "nlsym/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlsym/catalog.hpp"
#include "nlsym/genform.hpp"
#include "nlsym/legendre.hpp"
#include "nlsym/residual.hpp"
#include "nlsym/superpose.hpp"
#include "nlsym/symmetry.hpp"

namespace nlsym {

using nlohmann::json;

namespace {

// Thrown for malformed user input after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  bool json = false;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Inputs {
  std::vector<std::string> consts;  // NAME=VALUE
  std::vector<std::string> box;     // var:lo:hi
  std::vector<std::string> grid;    // var:min:max:n
  std::size_t samples = 100;
};

void add_inputs(CLI::App* c, Inputs& in, bool grid) {
  c->add_option("--const", in.consts, "free constant value, NAME=VALUE (repeatable)");
  c->add_option("--box", in.box, "sampling interval var:lo:hi (repeatable; default [0.2, 1.2])");
  c->add_option("--samples", in.samples, "sample count")->capture_default_str();
  if (grid) c->add_option("--grid", in.grid, "grid axis var:min:max:n (repeatable)");
}

Bindings constants_of(const Inputs& in) {
  Bindings out;
  for (const auto& s : in.consts) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--const expects NAME=VALUE, got '" + s + "'");
    try {
      std::size_t used = 0;
      std::string v = s.substr(eq + 1);
      out[s.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw UsageError("--const value must be a number: '" + s + "'");
    }
  }
  return out;
}

Expr parse_user(const std::string& text, const std::vector<std::string>& vars, const Bindings& consts,
                const char* flag) {
  std::vector<std::string> names;
  for (const auto& [k, v] : consts) names.push_back(k);
  try {
    return parse_expr(text, SymbolTable::with(vars, names));
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what() + " (declare constants with --const NAME=VALUE)");
  }
}

SampleDomain domain_of(const Inputs& in, const std::vector<std::string>& vars, const Bindings& consts,
                       const Global& g) {
  SampleDomain d;
  d.count = in.samples;
  d.seed = g.seed;
  d.constants = consts;
  std::map<std::string, Interval> given;
  for (const auto& s : in.box) {
    std::stringstream ss(s);
    std::string var, lo, hi;
    if (!std::getline(ss, var, ':') || !std::getline(ss, lo, ':') || !std::getline(ss, hi))
      throw UsageError("--box expects var:lo:hi, got '" + s + "'");
    try {
      given[var] = {var, std::stod(lo), std::stod(hi)};
    } catch (const std::exception&) {
      throw UsageError("--box bounds must be numbers: '" + s + "'");
    }
    if (std::find(vars.begin(), vars.end(), var) == vars.end()) throw UsageError("--box: unknown variable " + var);
  }
  for (const auto& v : vars) d.box.push_back(given.count(v) ? given[v] : Interval{v, 0.2, 1.2});
  return d;
}

std::vector<Axis> axes_of(const Inputs& in, const std::vector<std::string>& vars, const char* what) {
  std::map<std::string, Axis> given;
  for (const auto& s : in.grid) {
    try {
      Axis a = parse_axis(s);
      given[a.var] = a;
    } catch (const std::exception& e) {
      throw UsageError(std::string("--grid: ") + e.what());
    }
  }
  std::vector<Axis> out;
  for (const auto& v : vars) {
    if (!given.count(v)) throw UsageError(std::string(what) + " needs --grid for " + v);
    out.push_back(given[v]);
  }
  if (given.size() != vars.size()) throw UsageError(std::string(what) + ": --grid names a variable outside the equation");
  return out;
}

json report_obj(const Report& r) { return json::parse(report_json(r)); }

std::string verdict(const Report& r) {
  std::ostringstream s;
  s << (r.pass ? "pass" : "fail") << " (" << method_name(r.method) << ", max residual " << r.max_residual;
  if (!r.argmax.empty()) s << " at " << describe_point(r.argmax);
  if (r.samples) s << ", " << r.samples << " samples";
  s << ")";
  if (!r.note.empty()) s << " " << r.note;
  return s.str();
}

void write_grid(const GridFunction& g, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    g.write_csv(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  g.write_csv(f);
}

Vec3 parse_vec3(const std::string& s, const char* flag) {
  std::stringstream ss(s);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + " expects a,b,c");
    }
  }
  if (v.size() != 3) throw UsageError(std::string(flag) + " expects three comma-separated numbers");
  return Vec3(v[0], v[1], v[2]);
}

std::vector<std::string> names(const Vars3& v) { return {v.begin(), v.end()}; }

// ---- commands ----

int cmd_verify(const Global& g, const std::string& eqname, const std::string& utext, const Inputs& in,
               bool sampled, double fd_tol, std::ostream& out) {
  Equation eq;
  try {
    eq = equation_from_name(eqname);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  PDESpec spec = pde(eq);
  Bindings c = constants_of(in);
  Expr u = parse_user(utext, spec.vars, c, "--u");
  Report r;
  if (!in.grid.empty()) {
    r = grid_report(fd_residual(spec, GridFunction::sample(u, axes_of(in, spec.vars, "verify"), c)), fd_tol);
  } else {
    r = check_solution(spec, u, domain_of(in, spec.vars, c, g), g.tol, CheckOptions{!sampled});
  }
  if (g.json)
    out << report_json(r, 2) << "\n";
  else
    out << equation_name(eq) << ": " << verdict(r) << "\n";
  return r.pass ? 0 : 1;
}

Equation generator_equation(Generator gen) { return gen == Generator::Thm3 ? Equation::NLHeat : Equation::Burgers; }

Generator parse_generator(const std::string& s) {
  try {
    return generator_from_name(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_generate(const Global& g, const std::string& gname, const std::string& utext, bool verify, const Inputs& in,
                 std::ostream& out) {
  Generator gen = parse_generator(gname);
  PDESpec spec = pde(generator_equation(gen));
  Bindings c = constants_of(in);
  Expr u = parse_user(utext, spec.vars, c, "--u");
  Expr v = generate(gen, u);
  json j{{"expression", render(v)}};
  bool pass = true;
  std::string line = render(v);
  if (verify) {
    Report r = check_solution(spec, v, domain_of(in, spec.vars, c, g), g.tol);
    j["report"] = report_obj(r);
    pass = r.pass;
    line += "\n" + verdict(r);
  }
  out << (g.json ? j.dump(2) : line) << "\n";
  return pass ? 0 : 1;
}

int cmd_chain(const Global& g, const std::string& gname, const std::string& seed, std::size_t n, bool verify,
              const Inputs& in, std::ostream& out, std::ostream& err) {
  Generator gen = parse_generator(gname);
  PDESpec spec = pde(generator_equation(gen));
  Bindings c = constants_of(in);
  ChainOptions opt;
  opt.verify = verify;
  opt.tol = g.tol;
  opt.domain = domain_of(in, spec.vars, c, g);
  ChainResult r = chain(gen, parse_user(seed, spec.vars, c, "--seed"), n, opt);
  bool pass = !r.stopped_at.has_value();
  json arr = json::array();
  for (std::size_t k = 0; k < r.elements.size(); ++k) {
    json e{{"expression", render(r.elements[k])}};
    if (k < r.reports.size()) {
      e["report"] = report_obj(r.reports[k]);
      pass = pass && r.reports[k].pass;
    }
    arr.push_back(e);
  }
  if (g.json) {
    out << arr.dump(2) << "\n";
  } else {
    for (std::size_t k = 0; k < r.elements.size(); ++k) {
      out << k << ": " << render(r.elements[k]);
      if (k < r.reports.size()) out << "  [" << (r.reports[k].pass ? "pass" : "fail") << "]";
      out << "\n";
    }
    if (verify) out << (pass ? "pass" : "fail") << "\n";
  }
  if (r.stopped_at) err << "chain stopped at step " << *r.stopped_at << ": " << r.message << "\n";
  return pass ? 0 : 1;
}

int cmd_superpose(const Global& g, const std::string& eqname, const std::string& u1t, const std::string& u2t,
                  const std::string& c1t, const std::string& c2t, const std::string& anchor, bool verify,
                  double fd_tol, const std::string& outpath, const Inputs& in, std::ostream& out) {
  Bindings c = constants_of(in);
  std::vector<std::string> vars{"x0", "x1"};
  Expr u1 = parse_user(u1t, vars, c, "--u1"), u2 = parse_user(u2t, vars, c, "--u2");
  if (eqname == "burgers") {
    Bindings cc = c;
    for (const char* k : {"C1", "C2"})
      if (!cc.count(k)) cc[k] = std::string(k) == "C1" ? 1.0 : 0.5;
    Expr w1 = parse_user(c1t, vars, cc, "--c1"), w2 = parse_user(c2t, vars, cc, "--c2");
    Expr u3 = burgers_superpose(u1, u2, w1, w2);
    json j{{"expression", render(u3)}};
    std::string line = render(u3);
    bool pass = true;
    if (verify) {
      SampleDomain d = domain_of(in, vars, cc, g);
      d.complex = true;
      Report r = check_solution(pde(Equation::Burgers), u3, d, g.tol);
      j["report"] = report_obj(r);
      line += "\n" + verdict(r);
      pass = r.pass;
    }
    out << (g.json ? j.dump(2) : line) << "\n";
    return pass ? 0 : 1;
  }
  if (eqname != "nlheat") throw UsageError("superpose: equation must be burgers or nlheat");
  std::vector<Axis> axes = axes_of(in, vars, "superpose nlheat");
  NLHeatAnchor a;
  {
    auto colon = anchor.find(':');
    if (anchor.empty() || colon == std::string::npos) throw UsageError("superpose nlheat needs --anchor x1:tau1[,tau1...]");
    try {
      a.x1 = std::stod(anchor.substr(0, colon));
      std::stringstream ss(anchor.substr(colon + 1));
      std::string part;
      while (std::getline(ss, part, ',')) a.tau1.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw UsageError("--anchor expects numbers, x1:tau1[,tau1...]");
    }
  }
  NLHeatOptions opt;
  opt.constants = c;
  NLHeatSuperposition s = nlheat_superpose(u1, u2, axes, a, opt);
  Report fd = grid_report(fd_residual(pde(Equation::NLHeat), s.u), fd_tol);
  Report pr = verify_pairing(s.pairing, u1, u2, fd_tol, c);
  bool pass = !verify || (fd.pass && pr.pass);
  if (!outpath.empty()) write_grid(s.u, outpath, out);
  if (g.json) {
    json j{{"fd_residual", report_obj(fd)}, {"pairing", report_obj(pr)}, {"masked", s.u.masked()}};
    if (!outpath.empty()) j["grid"] = outpath;
    out << j.dump(2) << "\n";
  } else if (outpath != "-") {
    out << "fd residual: " << verdict(fd) << "\npairing: " << verdict(pr) << "\n";
  }
  return pass ? 0 : 1;
}

int cmd_legendre(const Global& g, const std::string& vt, const std::string& guess, bool verify, double fd_tol,
                 const std::string& outpath, const Inputs& in, std::ostream& out) {
  Bindings c = constants_of(in);
  std::vector<std::string> all{"x0", "x1", "x2", "y0", "y1", "y2"};
  Expr v = parse_user(vt, all, c, "--v");
  auto [from, to] = legendre_vars(v);
  Equation target = from[0] == "y0" ? Equation::Slid : Equation::DAlembert;
  if (in.grid.empty()) {
    Expr u;
    try {
      u = legendre_quadratic(v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string(e.what()) + "; non-quadratic input needs --grid");
    }
    json j{{"expression", render(u)}};
    std::string line = render(u);
    bool pass = true;
    if (verify) {
      Report r = check_solution(pde(target), u, domain_of(in, names(to), c, g), g.tol);
      j["report"] = report_obj(r);
      line += "\n" + verdict(r);
      pass = r.pass;
    }
    out << (g.json ? j.dump(2) : line) << "\n";
    return pass ? 0 : 1;
  }
  NewtonOptions opt;
  opt.constants = c;
  if (!guess.empty()) opt.guess = parse_vec3(guess, "--guess");
  GridFunction u = legendre_numeric(v, axes_of(in, names(to), "legendre"), opt);
  Report r = grid_report(fd_residual(pde(target), u), fd_tol);
  if (!outpath.empty()) write_grid(u, outpath, out);
  if (g.json)
    out << json{{"fd_residual", report_obj(r)}, {"masked", u.masked()}}.dump(2) << "\n";
  else if (outpath != "-")
    out << equation_name(target) << " fd residual: " << verdict(r) << "\n";
  return !verify || r.pass ? 0 : 1;
}

int cmd_slid_superpose(const Global& g, const std::string& u1t, const std::string& u2t, const std::string& guess,
                       bool verify, double fd_tol, const std::string& outpath, const Inputs& in, std::ostream& out) {
  Bindings c = constants_of(in);
  std::vector<std::string> vars = pde(Equation::Slid).vars;
  Expr u1 = parse_user(u1t, vars, c, "--u1"), u2 = parse_user(u2t, vars, c, "--u2");
  if (in.grid.empty()) {
    Expr u;
    try {
      u = slid_superpose_quadratic(u1, u2);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string(e.what()) + "; non-quadratic input needs --grid");
    }
    json j{{"expression", render(u)}};
    std::string line = render(u);
    bool pass = true;
    if (verify) {
      Report r = check_solution(pde(Equation::Slid), u, domain_of(in, vars, c, g), g.tol);
      j["report"] = report_obj(r);
      line += "\n" + verdict(r);
      pass = r.pass;
    }
    out << (g.json ? j.dump(2) : line) << "\n";
    return pass ? 0 : 1;
  }
  NewtonOptions opt;
  opt.constants = c;
  if (!guess.empty()) opt.guess = parse_vec3(guess, "--guess");
  SlidSuperposition s = slid_superpose(u1, u2, axes_of(in, vars, "slid-superpose"), opt);
  Report r = grid_report(fd_residual(pde(Equation::Slid), s.u), fd_tol);
  if (!outpath.empty()) write_grid(s.u, outpath, out);
  if (g.json)
    out << json{{"fd_residual", report_obj(r)}, {"masked", s.u.masked()}}.dump(2) << "\n";
  else if (outpath != "-")
    out << "slid fd residual: " << verdict(r) << "\n";
  return !verify || r.pass ? 0 : 1;
}

const char* const kGroupParams[] = {"a0", "a1", "a2", "a3", "a4", "a5", "b0", "b1", "b2", "c1", "c2", "c3"};

std::vector<std::string> group_param_names(GroupKind k) {
  switch (k) {
    case GroupKind::Translate: return {"a0", "a1", "a2", "a3"};
    case GroupKind::ScaleX: return {"a4"};
    case GroupKind::ScaleU: return {"a5"};
    case GroupKind::AddLinear: return {"b0", "b1", "b2"};
    case GroupKind::Rotate12: return {"c1"};
    case GroupKind::Lorentz01: return {"c2"};
    case GroupKind::Lorentz02: return {"c3"};
  }
  return {};
}

int cmd_transform(const Global& g, const std::string& eqname, const std::string& kind, const std::string& utext,
                  const std::map<std::string, std::string>& params, bool verify, const Inputs& in,
                  std::ostream& out) {
  if (eqname != "slid") throw UsageError("transform: only slid is supported");
  GroupKind k;
  try {
    k = group_kind_from_name(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Bindings c = constants_of(in);
  std::vector<std::string> vars = pde(Equation::Slid).vars;
  Expr u = parse_user(utext, vars, c, "--u");
  std::vector<std::string> wanted = group_param_names(k);
  for (const auto& [name, value] : params)
    if (!value.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end())
      throw UsageError("--" + name + " does not apply to " + std::string(group_kind_name(k)));
  GroupElement el{k, {}};
  for (const auto& p : wanted) {
    auto it = params.find(p);
    el.params.push_back(it == params.end() || it->second.empty() ? Expr::integer(0)
                                                                 : parse_user(it->second, {}, c, "group parameter"));
  }
  Expr v = apply_group_transform(el, u);
  json j{{"expression", render(v)}};
  std::string line = render(v);
  bool pass = true;
  if (verify) {
    Report r = check_solution(pde(Equation::Slid), v, domain_of(in, vars, c, g), g.tol);
    j["report"] = report_obj(r);
    line += "\n" + verdict(r);
    pass = r.pass;
  }
  out << (g.json ? j.dump(2) : line) << "\n";
  return pass ? 0 : 1;
}

int cmd_invariance(const Global& g, const std::string& opname, const std::string& utext, const Inputs& in,
                   std::ostream& out) {
  SlidOp op;
  try {
    op = slid_op_from_name(opname);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Bindings c = constants_of(in);
  std::vector<std::string> vars = pde(Equation::Slid).vars;
  Expr u = parse_user(utext, vars, c, "--u");
  SampleDomain d = domain_of(in, vars, c, g);
  InvarianceReport r;
  try {
    r = infinitesimal_check(slid_generator(op), u, d);
  } catch (const std::invalid_argument& e) {
    // u is not a solution: a verification failure, not a usage error
    r.note = e.what();
  }
  if (g.json) {
    json at = json::object();
    for (const auto& [k, v] : r.argmax) at[k] = v.real();
    out << json{{"pass", r.pass},       {"identically_zero", r.identically_zero}, {"slope", r.slope},
                {"eps", r.eps},         {"max_residual", r.max_residual},         {"argmax", at},
                {"note", r.note}}
               .dump(2)
        << "\n";
  } else {
    out << slid_op_name(op) << ": " << (r.pass ? "pass" : "fail");
    if (r.identically_zero)
      out << " (residual vanishes to rounding)";
    else if (r.max_residual.empty())
      out << ": " << r.note;
    else
      out << " (slope " << r.slope << ") " << r.note;
    out << "\n";
  }
  return r.pass ? 0 : 1;
}

json record_obj(const SolutionRecord& r) {
  json j{{"id", r.id}, {"equation", equation_name(r.equation)}, {"expression", r.expression}};
  json c = json::object();
  for (const auto& [k, v] : r.constants) c[k] = v.imag() == 0.0 ? json(v.real()) : json::array({v.real(), v.imag()});
  j["constants"] = c;
  json d = json::object();
  for (const auto& iv : r.domain) d[iv.var] = {iv.lo, iv.hi};
  j["domain"] = d;
  json s = json::array();
  for (const auto& l : r.singular)
    s.push_back({{"expr", l.text}, {"kind", l.constraint.kind == ConstraintKind::Positive ? "positive" : "nonzero"}});
  j["singular"] = s;
  j["provenance"] = r.provenance;
  j["tags"] = r.tags;
  j["suspect"] = r.suspect;
  if (r.complex) j["complex"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

int cmd_catalog(const Global& g, const std::string& action, const std::string& file,
                const std::vector<std::string>& ids, const std::string& tag, std::size_t samples,
                std::ostream& out) {
  Catalog cat;
  try {
    cat = file.empty() ? Catalog::builtin() : Catalog::load(file);
  } catch (const CatalogError& e) {
    throw UsageError(e.what());
  }
  std::vector<const SolutionRecord*> sel;
  if (!ids.empty()) {
    for (const auto& id : ids) {
      const SolutionRecord* r = cat.find(id);
      if (!r) throw UsageError("no catalog record '" + id + "'");
      sel.push_back(r);
    }
  } else {
    for (const auto& r : cat.records())
      if (tag.empty() || r.has_tag(tag)) sel.push_back(&r);
  }
  if (action == "list") {
    if (g.json) {
      json arr = json::array();
      for (const auto* r : sel) arr.push_back({{"id", r->id}, {"equation", equation_name(r->equation)}, {"expression", r->expression}});
      out << arr.dump(2) << "\n";
    } else {
      for (const auto* r : sel)
        out << r->id << "  " << equation_name(r->equation) << "  " << r->expression << (r->suspect ? "  [suspect]" : "")
            << "\n";
    }
    return 0;
  }
  if (action == "show") {
    if (ids.empty()) throw UsageError("catalog show needs --id");
    for (const auto* r : sel) {
      if (g.json) {
        out << record_obj(*r).dump(2) << "\n";
        continue;
      }
      out << "id:          " << r->id << "\nequation:    " << equation_name(r->equation)
          << "\nexpression:  " << r->expression << "\nrendered:    " << render(r->expr) << "\nconstants:   "
          << describe_point(r->constants) << "\ndomain:      ";
      for (const auto& iv : r->domain) out << iv.var << " in [" << iv.lo << ", " << iv.hi << "] ";
      out << "\nsingular:    ";
      for (const auto& l : r->singular)
        out << l.text << (l.constraint.kind == ConstraintKind::Positive ? " > 0; " : " != 0; ");
      out << "\nprovenance:  " << r->provenance << "\ntags:        ";
      for (const auto& t : r->tags) out << t << " ";
      out << "\nsuspect:     " << (r->suspect ? "yes" : "no") << "\n";
      if (!r->note.empty()) out << "note:        " << r->note << "\n";
    }
    return 0;
  }
  // verify
  std::vector<SolutionRecord> chosen;
  for (const auto* r : sel) chosen.push_back(*r);
  CatalogReport rep = Catalog(std::move(chosen)).verify_all(g.tol, samples, g.seed);
  if (g.json) {
    out << catalog_report_json(rep, 2) << "\n";
  } else {
    for (const auto& r : rep.records) {
      out << (r.pass ? "pass " : r.suspect ? "FAIL (suspect, reported) " : "FAIL ") << r.id;
      if (!r.error.empty())
        out << ": " << r.error;
      else if (!r.pass)
        out << ": " << verdict(r.report);
      out << "\n";
    }
    out << rep.checked << " records, " << rep.failed << " failed, " << rep.suspect_failed << " suspect failed\n";
  }
  return rep.pass ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nlsym: generate, superpose and verify exact solutions of the Burgers, nonlinear heat and Slid equations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file mirroring the command-line flags");
  Global g;
  if (const char* t = std::getenv("NLSYM_TOL")) {
    try {
      g.tol = std::stod(t);
    } catch (const std::exception&) {
      err << "NLSYM_TOL is not a number: " << t << "\n";
      return 2;
    }
  }
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_option("--tol", g.tol, "verification tolerance (default 1e-8 or NLSYM_TOL)");
  app.add_option("--rng-seed", g.seed, "sampling seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker cap, 0 for all cores");

  Inputs in;
  std::string eq, u, u1, u2, v, gen, seed, c1 = "C1", c2 = "C2", anchor, guess, outpath, kind, op, action = "verify",
                                         file, tag;
  std::size_t n = 3;
  bool verify = false, sampled = false;
  double fd_tol = 1e-3;
  std::vector<std::string> ids;
  std::map<std::string, std::string> params;

  auto* cv = app.add_subcommand("verify", "check that an expression solves an equation");
  cv->add_option("--eq", eq, "burgers|nlheat|linheat|dalembert|slid")->required();
  cv->add_option("--u", u, "expression")->required();
  cv->add_flag("--sampled", sampled, "skip the symbolic attempt");
  cv->add_option("--fd-tol", fd_tol, "tolerance for the finite-difference check with --grid")->capture_default_str();
  add_inputs(cv, in, true);

  auto* cg = app.add_subcommand("generate", "apply a generating formula once");
  cg->add_option("--gen", gen, "thm1|thm2|thm3|thm4")->required();
  cg->add_option("--u", u, "seed solution")->required();
  cg->add_flag("--verify", verify, "check the output");
  add_inputs(cg, in, false);

  auto* cc = app.add_subcommand("chain", "iterate a generating formula");
  cc->add_option("--gen", gen, "thm1|thm2|thm3|thm4")->required();
  cc->add_option("--seed", seed, "seed solution")->required();
  cc->add_option("--n", n, "number of steps")->capture_default_str();
  cc->add_flag("--verify", verify, "check every element");
  add_inputs(cc, in, false);

  auto* cs = app.add_subcommand("superpose", "nonlinear superposition of two solutions");
  cs->add_option("equation", eq, "burgers|nlheat")->required();
  cs->add_option("--u1", u1)->required();
  cs->add_option("--u2", u2)->required();
  cs->add_option("--c1", c1, "weight of the first potential (burgers)")->capture_default_str();
  cs->add_option("--c2", c2, "weight of the second potential (burgers)")->capture_default_str();
  cs->add_option("--anchor", anchor, "x1:tau1[,tau1 per slice] (nlheat)");
  cs->add_option("--out", outpath, "CSV output for the nlheat grid, - for stdout");
  cs->add_option("--fd-tol", fd_tol)->capture_default_str();
  cs->add_flag("--verify", verify, "check the output");
  add_inputs(cs, in, true);

  auto* cl = app.add_subcommand("legendre", "Legendre transform, exact for quadratics, else on --grid");
  cl->add_option("--v", v, "expression in y0..y2 or x0..x2")->required();
  cl->add_option("--guess", guess, "Newton start a,b,c");
  cl->add_option("--out", outpath, "CSV output, - for stdout");
  cl->add_option("--fd-tol", fd_tol)->capture_default_str();
  cl->add_flag("--verify", verify, "check the image against the target equation");
  add_inputs(cl, in, true);

  auto* cp = app.add_subcommand("slid-superpose", "superpose two Slid solutions, exact for quadratics, else on --grid");
  cp->add_option("--u1", u1)->required();
  cp->add_option("--u2", u2)->required();
  cp->add_option("--guess", guess, "Newton start for theta a,b,c");
  cp->add_option("--out", outpath, "CSV output, - for stdout");
  cp->add_option("--fd-tol", fd_tol)->capture_default_str();
  cp->add_flag("--verify", verify, "check the composite");
  add_inputs(cp, in, true);

  auto* ct = app.add_subcommand("transform", "apply a one-parameter group element");
  ct->add_option("equation", eq, "slid")->required();
  ct->add_option("--kind", kind, "translate|scale_x|scale_u|add_linear|rotate_12|lorentz_01|lorentz_02")->required();
  ct->add_option("--u", u)->required();
  for (const char* p : kGroupParams) ct->add_option(std::string("--") + p, params[p], "group parameter");
  ct->add_flag("--verify", verify, "check the output");
  add_inputs(ct, in, false);

  auto* ck = app.add_subcommand("check", "symmetry checks");
  ck->require_subcommand(1);
  auto* ci = ck->add_subcommand("invariance", "infinitesimal invariance of a Slid solution under a generator");
  ci->add_option("--op", op, "P0 P1 P2 P3 I J01 J02 J12 D Q0 Q1 Q2")->required();
  ci->add_option("--u", u)->required();
  add_inputs(ci, in, false);

  auto* ca = app.add_subcommand("catalog", "list, show or verify catalog records");
  ca->add_option("action", action, "verify|list|show")->check(CLI::IsMember({"verify", "list", "show"}))->capture_default_str();
  ca->add_option("--file", file, "catalog JSON (default: shipped corpus or NLSYM_CATALOG)");
  ca->add_option("--id", ids, "record id (repeatable)");
  ca->add_option("--tag", tag, "only records with this tag");
  ca->add_option("--samples", in.samples, "samples per record")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    for (const auto* sub : app.get_subcommands()) {
      err << sub->help();
      return 2;
    }
    err << "run with --help for usage\n";
    return 2;
  }

  if (g.threads) set_thread_count(g.threads);
  try {
    if (cv->parsed()) return cmd_verify(g, eq, u, in, sampled, fd_tol, out);
    if (cg->parsed()) return cmd_generate(g, gen, u, verify, in, out);
    if (cc->parsed()) return cmd_chain(g, gen, seed, n, verify, in, out, err);
    if (cs->parsed()) return cmd_superpose(g, eq, u1, u2, c1, c2, anchor, verify, fd_tol, outpath, in, out);
    if (cl->parsed()) return cmd_legendre(g, v, guess, verify, fd_tol, outpath, in, out);
    if (cp->parsed()) return cmd_slid_superpose(g, u1, u2, guess, verify, fd_tol, outpath, in, out);
    if (ct->parsed()) return cmd_transform(g, eq, kind, u, params, verify, in, out);
    if (ci->parsed()) return cmd_invariance(g, op, u, in, out);
    if (ca->parsed()) return cmd_catalog(g, action, file, ids, tag, in.samples, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NewtonError& e) {
    err << "error: " << e.what() << (e.singular ? " (singular Jacobian)" : "") << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace nlsym
