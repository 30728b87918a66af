#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "nlsym/calculus.hpp"
#include "nlsym/simplify.hpp"
#include "nlsym/symmetry.hpp"

using namespace nlsym;

namespace {

const SymbolTable kSyms = SymbolTable::with({"x0", "x1", "x2", "y0", "y1", "u", "p11", "p12", "p22"},
                                                {"C1", "C2", "a", "c3"});

Expr P(const std::string& s) { return parse_expr(s, kSyms); }

SampleDomain slid_box(double lo0, double hi0, double lo1, double hi1, double lo2, double hi2) {
  SampleDomain d;
  d.box = {{"x0", lo0, hi0}, {"x1", lo1, hi1}, {"x2", lo2, hi2}};
  d.constants = {{"C1", 0.5}, {"C2", 0.3}, {"a", 0.6}, {"c3", 0.4}};
  d.seed = 17;
  return d;
}

struct Fixture {
  const char* name;
  Expr u;
  SampleDomain dom;
};

std::vector<Fixture> slid_fixtures() {
  return {
      {"p1+q0", P("x0*x1 + x2^2/2 + x0^2/2 + C1*x0 + C2"), slid_box(-1, 1, -1, 1, -1, 1)},
      {"j02+j12 radical", P("C1*sqrt(x2^2 + x1^2 - x0^2)/(x0 + x1)"), slid_box(-0.5, 0.5, 1, 2, 0.5, 1.5)},
      {"j02+j12 rational", P("(C2*(x2^2 + x1^2 - x0^2) + C1)/(x0 + x1)"), slid_box(-0.5, 0.5, 1, 2, 0.5, 1.5)},
  };
}

std::vector<Fixture> all_slid_solutions() {
  std::vector<Fixture> out = slid_fixtures();
  for (const auto& r : slid_reductions())
    for (const auto& s : r.solutions) out.push_back({r.id.c_str(), s, r.domain});
  out.push_back({"lorentz generated", P("(C2*(x2^2 + x1^2 - x0^2) + C1)/(x0*cosh(c3) + x2*sinh(c3) + x1)"),
                 slid_box(-0.5, 0.5, 1, 2, 0.5, 1.5)});
  return out;
}

bool same(const Expr& a, const Expr& b, const SampleDomain& d, double tol = 1e-10) {
  return equivalent(a, b, d, tol).pass;
}

}  // namespace

TEST_CASE("slid generators") {
  auto g = slid_generators();
  REQUIRE(g.size() == 12);
  CHECK(g[5].name == "J01");
  CHECK(g[5].xi[0] == P("x1"));
  CHECK(g[5].xi[1] == P("x0"));
  CHECK(slid_generator(SlidOp::Q1).eta == P("x1"));
  CHECK(slid_generator(SlidOp::I).eta == P("u"));
  CHECK(slid_op_from_name("J12") == SlidOp::J12);
  CHECK_THROWS_AS(slid_op_from_name("J21"), std::invalid_argument);

  auto c = span_coefficients(commutator(slid_generator(SlidOp::P0), slid_generator(SlidOp::D)), g);
  REQUIRE(c);
  for (int k = 0; k < 12; ++k) CHECK((*c)[k] == (k == 0 ? 1 : 0));

  for (SlidOp o : {SlidOp::P3, SlidOp::Q0, SlidOp::Q2})
    for (const auto& f : commutator(slid_generator(SlidOp::Q1), slid_generator(o))) CHECK(f.is_zero());

  // closure
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      CHECK_MESSAGE(span_coefficients(commutator(g[i], g[j]), g).has_value(), g[i].name << ", " << g[j].name);

  // a field outside the algebra
  CHECK_FALSE(span_coefficients({P("x0^2"), P("0"), P("0"), P("0")}, g).has_value());
  CHECK_FALSE(span_coefficients({P("0"), P("0"), P("0"), P("x0*u")}, g).has_value());
}

TEST_CASE("infinitesimal invariance") {
  for (const auto& f : slid_fixtures())
    for (const auto& op : slid_generators()) {
      InvarianceReport r = infinitesimal_check(op, f.u, f.dom);
      CHECK_MESSAGE(r.pass, f.name << ": " << r.note);
    }

  Fixture p = slid_fixtures()[0];
  InvarianceReport q0 = infinitesimal_check(slid_generator(SlidOp::Q0), p.u, p.dom);
  CHECK(q0.identically_zero);

  // D on the radical solution: its characteristic -x.grad u vanishes (degree
  // zero homogeneity), so the residual is zero rather than O(eps^2).
  Fixture rad = slid_fixtures()[1];
  CHECK(infinitesimal_check(slid_generator(SlidOp::D), rad.u, rad.dom).pass);
  // a genuine second-order case: J01 on the rational solution
  InvarianceReport j01 = infinitesimal_check(slid_generator(SlidOp::J01), slid_fixtures()[2].u, slid_fixtures()[2].dom);
  CHECK(j01.pass);

  SymOpSlid bogus{SlidOp::Q0, "bogus", {P("0"), P("0"), P("0")}, P("x0^2")};
  InvarianceReport b = infinitesimal_check(bogus, p.u, p.dom);
  CHECK_FALSE(b.pass);
  CHECK(b.slope == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(infinitesimal_check(slid_generator(SlidOp::D), P("x0^2*x1"), p.dom), std::invalid_argument);
}

TEST_CASE("second-order scaling when the characteristic has curvature") {
  // u + eps*Q with Slid(H_Q) != 0: for I on the radical solution Q = u and
  // the residual is (1 + eps)^2 Slid(u) = 0; for J02 it is O(eps^2).
  Fixture rad = slid_fixtures()[1];
  InvarianceReport r = infinitesimal_check(slid_generator(SlidOp::J02), rad.u, rad.dom);
  CHECK(r.pass);
  if (!r.identically_zero) CHECK(r.slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("group transformations") {
  Expr u = P("(C2*(x2^2 + x1^2 - x0^2) + C1)/(x0 + x1)");
  SampleDomain d = slid_box(-0.5, 0.5, 1, 2, 0.5, 1.5);
  Expr g = apply_group_transform({GroupKind::Lorentz02, {P("c3")}}, u);
  CHECK(same(g, P("(C2*(x2^2 + x1^2 - x0^2) + C1)/(x0*cosh(c3) + x2*sinh(c3) + x1)"), d));
  CHECK(check_solution(pde(Equation::Slid), g, d, 1e-8).pass);

  for (GroupKind k : {GroupKind::Translate, GroupKind::ScaleX, GroupKind::ScaleU, GroupKind::AddLinear,
                      GroupKind::Rotate12, GroupKind::Lorentz01, GroupKind::Lorentz02}) {
    std::vector<Expr> zeros(group_param_count(k), Expr::integer(0));
    CHECK(same(apply_group_transform({k, zeros}, u), u, d));
  }
  CHECK(simplifies_to_zero(apply_group_transform({GroupKind::AddLinear, {P("1"), P("2"), P("C1")}}, u) -
                           (u + P("x0 + 2*x1 + C1*x2"))));
  CHECK_THROWS_AS(apply_group_transform({GroupKind::Rotate12, {}}, u), std::invalid_argument);
  CHECK(group_kind_from_name("lorentz02") == GroupKind::Lorentz02);
  CHECK(group_kind_from_name("scale-x") == GroupKind::ScaleX);
}

TEST_CASE("group action preserves solutions") {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> small(-0.15, 0.15);
  std::uniform_int_distribution<int> kind(0, 6);
  for (int n = 0; n < 30; ++n) {
    GroupKind k = static_cast<GroupKind>(kind(rng));
    std::vector<Expr> params;
    for (std::size_t i = 0; i < group_param_count(k); ++i) params.push_back(Expr::flt(small(rng)));
    for (const auto& f : all_slid_solutions()) {
      Expr g = apply_group_transform({k, params}, f.u);
      Report r = check_solution(pde(Equation::Slid), g, f.dom, 1e-8, CheckOptions{false});
      CHECK_MESSAGE(r.pass, group_kind_name(k) << " on " << f.name << ": " << report_json(r));
    }
  }
}

TEST_CASE("composition of rotations and boosts") {
  Expr u = P("C1*sqrt(x2^2 + x1^2 - x0^2)/(x0 + x1) + x0*x2^2");
  SampleDomain d = slid_box(-0.5, 0.5, 1, 2, 0.5, 1.5);
  for (GroupKind k : {GroupKind::Rotate12, GroupKind::Lorentz01, GroupKind::Lorentz02}) {
    Expr two = apply_group_transform({k, {P("3/10")}}, apply_group_transform({k, {P("-1/5")}}, u));
    CHECK(same(two, apply_group_transform({k, {P("1/10")}}, u), d));
  }
  Expr s = apply_group_transform({GroupKind::ScaleX, {P("1/4")}}, apply_group_transform({GroupKind::ScaleX, {P("1/2")}}, u));
  CHECK(same(s, apply_group_transform({GroupKind::ScaleX, {P("3/4")}}, u), d));
}

TEST_CASE("reductions") {
  auto rs = slid_reductions();
  REQUIRE(rs.size() == 4);
  for (const auto& r : rs) {
    ReductionReport rep = check_reduction(r);
    CHECK_MESSAGE(rep.pass, r.id << ": " << rep.note << " factor " << render(rep.factor));
    CHECK(rep.method == Method::Symbolic);
    for (std::size_t k = 0; k < rep.solutions.size(); ++k)
      CHECK_MESSAGE(rep.solutions[k].pass, r.id << " solution " << k << ": " << report_json(rep.solutions[k]));
  }
  ReductionReport one = check_reduction(rs[0]);
  CHECK(one.factor == Expr::integer(1));

  // the printed phi solves the reduced equation of item 1
  Expr phi = P("x2^2/2 + x0^2/2 + C1*x0");
  Expr p12 = differentiate(differentiate(phi, "x0"), "x2"), p11 = differentiate(differentiate(phi, "x0"), "x0"),
       p22 = differentiate(differentiate(phi, "x2"), "x2");
  CHECK(simplifies_to_zero(p12 * p12 - p11 * p22 + Expr::integer(1)));

  // a mistranscribed reduced equation is caught
  ReductionAnsatz bad = rs[1];
  bad.reduced = P("p12^2 - p11*p22 + p22 + p11");
  CHECK_FALSE(check_reduction(bad).pass);
}

TEST_CASE("linear heat generators") {
  auto g = linear_heat_generators();
  CHECK(g.size() == 7);
  const SymOpLin* f = nullptr;
  const SymOpLin* gal = nullptr;
  for (const auto& op : g) {
    if (op.id == LinOp::F) f = &op;
    if (op.id == LinOp::G) gal = &op;
  }
  REQUIRE(f);
  REQUIRE(gal);
  CHECK(evaluate(f->eta, {{"y0", 0.0}, {"y1", 0.0}, {"v", 1.3}}) == Complex(0.0));
  CHECK(simplifies_to_zero(characteristic(*gal, P("1")) + P("y1/2")));
  CHECK(linear_heat_generators(P("y1^2 + 2*y0")).back().eta == P("y1^2 + 2*y0"));
  CHECK_THROWS_AS(linear_heat_generators(P("y1^2")), std::invalid_argument);
}
