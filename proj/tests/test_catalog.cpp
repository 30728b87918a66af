#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nlsym/catalog.hpp"
#include "nlsym/genform.hpp"
#include "nlsym/legendre.hpp"
#include "nlsym/symmetry.hpp"

using namespace nlsym;

namespace {

const Catalog& corpus() {
  static const Catalog c = Catalog::builtin();
  return c;
}

const char* kMinimal = R"([{"id": "a", "equation": "burgers", "expression": "x1/x0",
  "domain": {"x0": [0.5, 1], "x1": [0, 1]}, "provenance": "test"}])";

std::string with(const std::string& key, const std::string& value) {
  std::string s = R"({"id": "a", "equation": "burgers", "expression": "x1/x0", "domain": {"x0": [0.5, 1], "x1": [0, 1]}, "provenance": "p"})";
  // replace or append one field
  std::string needle = "\"" + key + "\": ";
  auto at = s.find(needle);
  if (at == std::string::npos) return "[" + s.substr(0, s.size() - 1) + ", " + needle + value + "}]";
  auto end = key == "domain" ? s.find("}", at) + 1 : s.find_first_of(",}", at);
  return "[" + s.substr(0, at) + needle + value + s.substr(end) + "]";
}

Vec3 center(const SolutionRecord& r) {
  Vec3 c;
  for (int i = 0; i < 3; ++i) c[i] = 0.5 * (r.domain[i].lo + r.domain[i].hi);
  return c;
}

bool degenerate_at(const Mat3& h) {
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return std::fabs(h.determinant()) < 1e-9 * scale * scale * scale;
}

}  // namespace

TEST_CASE("shipped corpus verifies") {
  const Catalog& c = corpus();
  CHECK(c.size() >= 40);
  CatalogReport rep = c.verify_all();
  CHECK_MESSAGE(rep.pass, catalog_report_json(rep, 2));
  CHECK(rep.checked == c.size());
  for (const auto& r : rep.records)
    if (!r.suspect) CHECK_MESSAGE(r.pass, r.id << ": " << r.error << report_json(r.report));
  // suspect records are reported; both known ones fail
  CHECK(rep.suspect_failed == 2);
  CHECK_FALSE(c.get("thm2.chain4.step1").note.empty());
}

TEST_CASE("corpus coverage") {
  const Catalog& c = corpus();
  CHECK(c.with_tag("thm1").size() == 12);
  CHECK(c.with_tag("thm2").size() == 15);
  CHECK(c.with_tag("thm4").size() == 10);
  CHECK(c.with_tag("reduction").size() == 7);
  CHECK(c.with_tag("generated").size() == 2);
  CHECK(c.for_equation(Equation::NLHeat).size() == 8);
  for (const auto& r : c.records()) {
    CHECK_MESSAGE(r.provenance.find("anchor: \"") != std::string::npos, r.id);
    CHECK(parse_expr(render(r.expr), r.symbols()) == r.expr);
  }
}

TEST_CASE("get") {
  const Catalog& c = corpus();
  SymbolTable s = SymbolTable::with({"x0", "x1"}, {"C", "C1"});
  const SolutionRecord& r = c.get("thm1.chain3.step2");
  CHECK(r.equation == Equation::Burgers);
  CHECK(equivalent(r.expr, parse_expr("x1*(60*x0^2 - 20*x0*x1^2 + x1^4)/(x0*(12*x0^2 - 12*x0*x1^2 + x1^4))", s),
                   r.sample_domain(), 1e-12)
            .pass);
  const SolutionRecord& w = c.get("nlheat.superpose.lambertw");
  CHECK(w.expr == parse_expr("(-x1 + 2*exp(lambertW(-(1/2)*(x1 + C)*exp(x0 - C1/2)) - x0 + C1/2) - C)^(-1)", s));
  CHECK(w.constants.at("C1") == Complex(6.0));
  CHECK_THROWS_AS(c.get("thm9.chain1.step0"), CatalogError);
  CHECK(c.find("thm9") == nullptr);
}

TEST_CASE("empty catalog passes vacuously") {
  Catalog c = Catalog::parse("[]");
  CatalogReport r = c.verify_all();
  CHECK(r.pass);
  CHECK(r.checked == 0);
}

TEST_CASE("schema errors") {
  CHECK(Catalog::parse(kMinimal).size() == 1);
  CHECK_THROWS_AS(Catalog::parse("{"), CatalogError);
  CHECK_THROWS_AS(Catalog::parse("{}"), CatalogError);
  CHECK_THROWS_AS(Catalog::parse("[1]"), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("equation", "\"kdv\"")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("expression", "\"x1/\"")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("expression", "\"x1/x0 + q\"")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("expression", "3")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("domain", R"({"x0": [0, 1]})")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("domain", R"({"x0": [1, 0], "x1": [0, 1]})")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("domain", R"({"x0": [0, 1], "x1": [0, 1], "x2": [0, 1]})")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("singular", R"([{"expr": "x0", "kind": "odd"}])")), CatalogError);
  CHECK_THROWS_AS(Catalog::parse(with("constants", R"({"C": "big"})")), CatalogError);
  CHECK(Catalog::parse(with("constants", R"({"C": [1, 2]})")).get("a").constants.at("C") == Complex(1, 2));
  std::string two = std::string(kMinimal);
  two = two.substr(0, two.size() - 1) + "," + two.substr(1);
  CHECK_THROWS_AS(Catalog::parse(two), CatalogError);
  CHECK_THROWS_AS(Catalog::load("/nonexistent/catalog.json"), CatalogError);
  try {
    Catalog::parse(with("expression", "\"x1/\""));
    FAIL("expected CatalogError");
  } catch (const CatalogError& e) {
    CHECK(e.record() == "a");
  }
}

TEST_CASE("verification failures are per record") {
  Catalog c = Catalog::parse(
      R"([{"id": "bad", "equation": "burgers", "expression": "x1^2", "domain": {"x0": [0, 1], "x1": [0, 1]}, "provenance": "p"},
          {"id": "odd", "equation": "burgers", "expression": "x1^2", "domain": {"x0": [0, 1], "x1": [0, 1]}, "provenance": "p", "suspect": true},
          {"id": "pole", "equation": "burgers", "expression": "1/x0", "domain": {"x0": [-1, 1], "x1": [0, 1]},
           "singular": [{"expr": "x0", "margin": 2}], "provenance": "p"},
          {"id": "ok", "equation": "burgers", "expression": "x1/x0", "domain": {"x0": [0.5, 1], "x1": [0, 1]}, "provenance": "p"}])");
  CatalogReport r = c.verify_all();
  CHECK_FALSE(r.pass);
  CHECK(r.failed == 2);
  CHECK(r.suspect_failed == 1);
  CHECK_FALSE(r.records[0].pass);
  CHECK(r.records[0].report.max_abs_residual > 0.1);
  CHECK_FALSE(r.records[2].error.empty());  // every sample excluded
  CHECK(r.records[3].pass);
}

TEST_CASE("chain records follow the generating formulas") {
  const Catalog& c = corpus();
  for (const char* g : {"thm1", "thm2", "thm4"}) {
    Generator gen = generator_from_name(g);
    for (const SolutionRecord* seed : c.with_tag(g)) {
      if (!seed->has_tag("step0")) continue;
      std::string prefix = seed->id.substr(0, seed->id.size() - 1);
      std::size_t n = 1;
      while (c.find(prefix + std::to_string(n))) ++n;
      ChainResult ch = chain(gen, seed->expr, n - 1);
      REQUIRE_MESSAGE(ch.elements.size() == n, seed->id << ": " << ch.message);
      for (std::size_t k = 1; k < n; ++k) {
        const SolutionRecord& r = c.get(prefix + std::to_string(k));
        bool same = equivalent(ch.elements[k], r.expr, r.sample_domain(), 1e-10).pass;
        if (r.suspect)
          CHECK_FALSE_MESSAGE(same, r.id);
        else
          CHECK_MESSAGE(same, r.id);
      }
    }
  }
}

TEST_CASE("slid records: invariance and degeneracy tags") {
  const Catalog& c = corpus();
  for (const SolutionRecord* r : c.for_equation(Equation::Slid)) {
    SampleDomain d = r->sample_domain(40, 3);
    for (const auto& op : slid_generators()) {
      InvarianceReport inv = infinitesimal_check(op, r->expr, d);
      CHECK_MESSAGE(inv.pass, r->id << " " << op.name << ": " << inv.note);
    }
    ExprField f(r->expr, kXVars, r->constants);
    CHECK_MESSAGE(degenerate_at(f.hessian(center(*r))) == r->has_tag("degenerate"), r->id);
  }
}

TEST_CASE("legendre images of catalog solutions") {
  const Catalog& c = corpus();
  for (const SolutionRecord* r : c.for_equation(Equation::DAlembert)) {
    ExprField f(r->expr, kYVars, r->constants);
    Vec3 y = center(*r);
    REQUIRE_FALSE(degenerate_at(f.hessian(y)));
    Vec3 x = f.gradient(y);
    std::vector<Axis> ax;
    for (int i = 0; i < 3; ++i) ax.push_back({kXVars[i], x[i] - 0.1, x[i] + 0.1, 11});
    NewtonOptions opt;
    opt.guess = y;
    GridFunction g = legendre_numeric(f, ax, opt);
    Report rep = grid_report(fd_residual(pde(Equation::Slid), g), 1e-3);
    CHECK_MESSAGE(rep.pass, r->id << " " << report_json(rep));
  }
  for (const SolutionRecord* r : c.for_equation(Equation::Slid)) {
    if (r->has_tag("degenerate")) continue;
    ExprField f(r->expr, kXVars, r->constants);
    Vec3 x = center(*r);
    Vec3 y = f.gradient(x);
    std::vector<Axis> ax;
    for (int i = 0; i < 3; ++i) ax.push_back({kYVars[i], y[i] - 0.02, y[i] + 0.02, 21});
    NewtonOptions opt;
    opt.guess = x;
    GridFunction g = legendre_numeric(f, ax, opt);
    Report rep = grid_report(fd_residual(pde(Equation::DAlembert), g), 1e-3);
    CHECK_MESSAGE(rep.pass, r->id << " " << report_json(rep));
  }
}
