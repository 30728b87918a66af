#include "nlsym/simplify.hpp"

#include <gmp.h>

#include <unordered_map>

#include "poly.hpp"

namespace nlsym {

namespace detail {

namespace {

bool fits_ll(const Rational& q) {
  return abs(numerator(q)) < Integer("1000000000000") && denominator(q) < Integer("1000000000000");
}

Exp to_exp(const Rational& q) {
  return Exp(numerator(q).convert_to<long long>(), denominator(q).convert_to<long long>());
}

bool exact_root(const Integer& n, long long q, Integer& out) {
  mpz_t r;
  mpz_init(r);
  int exact = mpz_root(r, n.backend().data(), static_cast<unsigned long>(q));
  out = Integer(r);
  mpz_clear(r);
  return exact != 0;
}

Rational rational_ipow(Rational b, long long n) {
  bool inv = n < 0;
  if (inv) n = -n;
  Rational r = 1;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return inv ? Rational(1) / r : r;
}

bool is_negative(const RatFunc& a) { return !a.is_zero() && a.num().lead_coef() < 0; }

RatFunc gen_power(const Gen* g, const Rational& e) {
  if (!fits_ll(e)) throw BudgetExceeded();
  return RatFunc(Poly::gen(g, to_exp(e)));
}

RatFunc const_power(const Rational& c, const Rational& e) {
  if (denominator(e) == 1) {
    if (c == 0 && e < 0) throw std::domain_error("division by zero");
    if (!fits_ll(e)) throw BudgetExceeded();
    return RatFunc::constant(rational_ipow(c, numerator(e).convert_to<long long>()));
  }
  if (c == 0) {
    if (e < 0) throw std::domain_error("division by zero");
    return RatFunc();
  }
  long long q = denominator(e).convert_to<long long>();
  Rational p = numerator(e);
  if (c < 0) {
    const Gen* unit = q == 2 ? imag_gen() : root_gen(Expr::integer(-1), q);
    return gen_power(unit, p) * const_power(-c, e);
  }
  Integer rn, rd;
  if (exact_root(numerator(c), q, rn) && exact_root(denominator(c), q, rd))
    return RatFunc::constant(rational_ipow(Rational(rn) / Rational(rd), numerator(e).convert_to<long long>()));
  // (n/d)^(1/q) = (n d^(q-1))^(1/q) / d, then pull q-th powers out of the integer radicand.
  Integer d = denominator(c);
  Integer rad = numerator(c) * boost::multiprecision::pow(d, static_cast<unsigned>(q - 1));
  Integer outside = 1;
  for (long p2 = 2; p2 < 10000; ++p2) {
    Integer pq = boost::multiprecision::pow(Integer(p2), static_cast<unsigned>(q));
    if (pq > rad) break;
    while (rad % pq == 0) {
      rad /= pq;
      outside *= p2;
    }
  }
  Rational factor = Rational(outside) / Rational(d);
  RatFunc unit = rad == 1 ? RatFunc::constant(1) : gen_power(root_gen(Expr::number(Rational(rad)), q), Rational(1));
  return rat_pow(RatFunc::constant(factor) * unit, numerator(e).convert_to<long long>());
}

RatFunc power_rat(const RatFunc& base, const Rational& e) {
  if (denominator(e) == 1) {
    if (!fits_ll(e)) throw BudgetExceeded();
    return rat_pow(base, numerator(e).convert_to<long long>());
  }
  if (base.is_zero()) {
    if (e < 0) throw std::domain_error("division by zero");
    return RatFunc();
  }
  if (base.is_constant()) return const_power(base.constant_value(), e);
  if (base.is_monomial()) {
    Rational c = base.num().lead_coef() / base.den().lead_coef();
    Monomial m = mono_mul(base.num().lead_mono(), mono_pow(base.den().lead_mono(), Exp(-1)));
    bool plain = c > 0;
    for (const auto& [g, x] : m.f)
      if (g->kind == GenKind::Root) plain = false;
    if (plain && fits_ll(e)) return const_power(c, e) * RatFunc(Poly::term(1, mono_pow(m, to_exp(e))));
  }
  long long q = denominator(e).convert_to<long long>();
  return gen_power(root_gen(to_expr(base), q), Rational(numerator(e)));
}

RatFunc exp_rat(const RatFunc& a);

Monomial exp_content(const Poly& p) {
  Monomial out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Monomial cur;
    for (const auto& [g, x] : m.f)
      if (g->kind == GenKind::Kernel && g->fn == Fn::Exp) cur.f.emplace_back(g, x);
    if (first) {
      out = cur;
      first = false;
      continue;
    }
    Monomial next;
    for (const auto& [g, x] : out.f) {
      Exp y = cur.degree(g);
      Exp lo = std::min(x, y);
      if (lo != Exp(0)) next.f.emplace_back(g, lo);
    }
    out = next;
  }
  return out;
}

RatFunc apply_rat(Fn fn, const Expr& arg);

struct Cache {
  std::unordered_map<Expr, RatFunc, ExprHash> map;
};

Cache& cache() {
  thread_local Cache c;
  if (c.map.size() > 50000) c.map.clear();
  return c;
}

RatFunc convert(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return RatFunc::constant(e.value());
    case Kind::Float:
      return RatFunc(Poly::gen(float_gen(e.float_value())));
    case Kind::Symbol:
      return RatFunc(Poly::gen(symbol_gen(e)));
    case Kind::Imag:
      return RatFunc(Poly::gen(imag_gen()));
    case Kind::Sum: {
      // Collect over a common denominator lazily: add numerators sharing a denominator.
      RatFunc acc;
      for (const auto& c : e.children()) acc = acc + to_rat(c);
      return acc;
    }
    case Kind::Product: {
      RatFunc acc = RatFunc::constant(1);
      for (const auto& c : e.children()) {
        acc = acc * to_rat(c);
        if (acc.is_zero()) break;
      }
      return acc;
    }
    case Kind::Quotient:
      return to_rat(e.children()[0]) / to_rat(e.children()[1]);
    case Kind::Power: {
      RatFunc b = to_rat(e.children()[0]);
      RatFunc x = to_rat(e.children()[1]);
      if (x.is_constant()) return power_rat(b, x.constant_value());
      return to_rat(Expr::apply(Fn::Exp, e.children()[1] * Expr::apply(Fn::Ln, e.children()[0])));
    }
    case Kind::Apply:
      return apply_rat(e.fn(), e.children()[0]);
  }
  return RatFunc();
}

RatFunc exp_rat(const RatFunc& a) {
  if (a.is_zero()) return RatFunc::constant(1);
  if (a.den().is_monomial()) {
    Rational dc = a.den().lead_coef();
    Monomial dm = mono_pow(a.den().lead_mono(), Exp(-1));
    RatFunc out = RatFunc::constant(1);
    for (const auto& [m0, c0] : a.num().terms()) {
      Rational c = c0 / dc;
      Monomial m = mono_mul(m0, dm);
      if (m.empty()) {
        out = out * gen_power(kernel_gen(Fn::Exp, Expr::integer(1)), c);
        continue;
      }
      if (m.f.size() == 1 && m.f[0].second == Exp(1) && m.f[0].first->kind == GenKind::Kernel) {
        const Gen* g = m.f[0].first;
        if (g->fn == Fn::Ln) {
          out = out * power_rat(to_rat(g->atom.children()[0]), c);
          continue;
        }
        if (g->fn == Fn::LambertW && denominator(c) == 1) {
          RatFunc z = to_rat(g->atom.children()[0]);
          out = out * power_rat(z / RatFunc(Poly::gen(g)), c);
          continue;
        }
      }
      out = out * gen_power(kernel_gen(Fn::Exp, to_expr(RatFunc(Poly::term(1, m)))), c);
    }
    return out;
  }
  if (is_negative(a)) return RatFunc::constant(1) / RatFunc(Poly::gen(kernel_gen(Fn::Exp, to_expr(-a))));
  return RatFunc(Poly::gen(kernel_gen(Fn::Exp, to_expr(a))));
}

RatFunc apply_rat(Fn fn, const Expr& arg) {
  RatFunc a = to_rat(arg);
  switch (fn) {
    case Fn::Exp:
      return exp_rat(a);
    case Fn::Ln: {
      if (a.is_zero()) throw std::domain_error("logarithm of zero");
      if (a.is_constant() && a.constant_value() == 1) return RatFunc();
      // ln(e^s * rest) = s + ln(rest)
      Monomial m = mono_mul(exp_content(a.num()), mono_pow(exp_content(a.den()), Exp(-1)));
      RatFunc s;
      for (const auto& [g, x] : m.f)
        s = s + RatFunc::constant(Rational(x.numerator()) / Rational(x.denominator())) * to_rat(g->atom.children()[0]);
      RatFunc rest = m.empty() ? a : a * RatFunc(Poly::term(1, mono_pow(m, Exp(-1))));
      if (rest.is_constant() && rest.constant_value() == 1) return s;
      return s + RatFunc(Poly::gen(kernel_gen(Fn::Ln, to_expr(rest))));
    }
    case Fn::Sqrt:
      return power_rat(a, Rational(1, 2));
    case Fn::Sin:
      if (a.is_zero()) return RatFunc();
      if (is_negative(a)) return -RatFunc(Poly::gen(kernel_gen(Fn::Sin, to_expr(-a))));
      return RatFunc(Poly::gen(kernel_gen(Fn::Sin, to_expr(a))));
    case Fn::Cos:
      if (a.is_zero()) return RatFunc::constant(1);
      return RatFunc(Poly::gen(kernel_gen(Fn::Cos, to_expr(is_negative(a) ? -a : a))));
    case Fn::Sinh: {
      RatFunc e = exp_rat(a);
      return (e - RatFunc::constant(1) / e) * RatFunc::constant(Rational(1, 2));
    }
    case Fn::Cosh: {
      RatFunc e = exp_rat(a);
      return (e + RatFunc::constant(1) / e) * RatFunc::constant(Rational(1, 2));
    }
    case Fn::Tanh: {
      RatFunc e2 = exp_rat(a * RatFunc::constant(2));
      return (e2 - RatFunc::constant(1)) / (e2 + RatFunc::constant(1));
    }
    case Fn::LambertW:
      if (a.is_zero()) return RatFunc();
      return RatFunc(Poly::gen(kernel_gen(Fn::LambertW, to_expr(a))));
  }
  return RatFunc();
}

Expr atom_power(const Expr& atom, const Rational& e) {
  if (e == 1) return atom;
  return Expr::power(atom, Expr::number(e));
}

std::vector<Expr> mono_factors(const Monomial& m) {
  std::vector<Expr> out;
  RatFunc exp_arg;
  bool has_exp = false;
  for (const auto& [g, x] : m.f) {
    Rational e = Rational(x.numerator()) / Rational(x.denominator());
    if (g->kind == GenKind::Kernel && g->fn == Fn::Exp) {
      exp_arg = exp_arg + RatFunc::constant(e) * to_rat(g->atom.children()[0]);
      has_exp = true;
    } else if (g->kind == GenKind::Root && g->atom.kind() != Kind::Imag) {
      out.push_back(Expr::power(g->base, Expr::number(e / g->index)));
    } else {
      out.push_back(atom_power(g->atom, e));
    }
  }
  if (has_exp && !exp_arg.is_zero()) out.push_back(Expr::apply(Fn::Exp, to_expr(exp_arg)));
  return out;
}

Expr term_expr(const Rational& c, const Monomial& m) {
  std::vector<Expr> f = mono_factors(m);
  if (f.empty()) return Expr::number(c);
  if (abs(c) != 1) f.insert(f.begin(), Expr::number(abs(c)));
  Expr pos = Expr::product(std::move(f));
  return c < 0 ? Expr::product({Expr::integer(-1), pos}) : pos;
}

}  // namespace

RatFunc to_rat(const Expr& e) {
  if (e.children().empty()) return convert(e);
  auto& c = cache().map;
  auto it = c.find(e);
  if (it != c.end()) return it->second;
  RatFunc r = convert(e);
  cache().map.emplace(e, r);
  return r;
}

Expr poly_to_expr(const Poly& p) {
  if (p.is_zero()) return Expr::integer(0);
  Monomial content;
  if (p.size() > 1) {
    for (const Gen* g : p.gens()) {
      bool first = true;
      Exp lo(0);
      for (const auto& [m, c] : p.terms()) {
        Exp e = m.degree(g);
        if (first || e < lo) lo = e;
        first = false;
      }
      if (lo > Exp(0)) content.f.emplace_back(g, lo);
    }
  }
  Monomial inv = mono_pow(content, Exp(-1));
  std::vector<Expr> terms;
  for (const auto& [m, c] : p.terms()) terms.push_back(term_expr(c, content.empty() ? m : mono_mul(m, inv)));
  Expr s = Expr::sum(std::move(terms));
  if (content.empty()) return s;
  std::vector<Expr> f = mono_factors(content);
  f.push_back(s);
  return Expr::product(std::move(f));
}

Expr to_expr(const RatFunc& r) {
  if (r.den().is_constant()) return poly_to_expr(r.num().scaled(Rational(1) / r.den().constant_value()));
  if (r.num().lead_coef() < 0)
    return Expr::product({Expr::integer(-1), Expr::quotient(poly_to_expr(-r.num()), poly_to_expr(r.den()))});
  return Expr::quotient(poly_to_expr(r.num()), poly_to_expr(r.den()));
}

}  // namespace detail

WorkLimit::WorkLimit(std::size_t ops) {
  detail::WorkMeter& w = detail::work_meter();
  saved_ = w.limit;
  std::size_t want = w.used + ops < w.used ? w.limit : w.used + ops;
  w.limit = std::min(w.limit, want);
}

WorkLimit::~WorkLimit() { detail::work_meter().limit = saved_; }

Expr simplify(const Expr& e) { return detail::to_expr(detail::to_rat(e)); }

std::optional<Expr> try_simplify(const Expr& e) {
  try {
    return simplify(e);
  } catch (const detail::BudgetExceeded&) {
    return std::nullopt;
  }
}

bool simplifies_to_zero(const Expr& e) {
  try {
    return detail::to_rat(e).is_zero();
  } catch (const detail::BudgetExceeded&) {
    return false;
  } catch (const std::domain_error&) {
    return false;
  }
}

std::pair<Expr, Expr> numer_denom(const Expr& e) {
  detail::RatFunc r = detail::to_rat(e);
  return {detail::poly_to_expr(r.num()), detail::poly_to_expr(r.den())};
}

std::optional<std::vector<Expr>> polynomial_coefficients(const Expr& e, const std::string& name) {
  using namespace detail;
  RatFunc r = to_rat(e);
  const Gen* target = nullptr;
  for (const Gen* g : r.den().gens())
    if (g->kind == GenKind::Symbol && g->atom.name() == name) return std::nullopt;
  for (const Gen* g : r.den().gens())
    if (depends_on(g->atom, name) || (g->kind == GenKind::Root && depends_on(g->base, name))) return std::nullopt;
  std::map<long long, Poly> by_degree;
  for (const auto& [m, c] : r.num().terms()) {
    Monomial rest;
    long long d = 0;
    for (const auto& [g, x] : m.f) {
      if (g->kind == GenKind::Symbol && g->atom.name() == name) {
        if (x.denominator() != 1 || x < Exp(0)) return std::nullopt;
        d = x.numerator();
        target = g;
      } else {
        if (depends_on(g->atom, name) || (g->kind == GenKind::Root && depends_on(g->base, name))) return std::nullopt;
        rest.f.emplace_back(g, x);
      }
    }
    by_degree[d].add_term(rest, c);
  }
  (void)target;
  long long top = by_degree.empty() ? 0 : by_degree.rbegin()->first;
  std::vector<Expr> out(static_cast<std::size_t>(top + 1), Expr::integer(0));
  for (auto& [d, p] : by_degree) out[static_cast<std::size_t>(d)] = to_expr(RatFunc::make(p, r.den()));
  return out;
}

}  // namespace nlsym
