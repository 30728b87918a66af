#include "poly.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace nlsym::detail {

namespace {

constexpr std::size_t kMaxTerms = 6000;

struct Registry {
  std::mutex mu;
  std::deque<Gen> gens;
  std::unordered_map<std::string, const Gen*> by_key;

  const Gen* intern(Gen g) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = by_key.find(g.key);
    if (it != by_key.end()) return it->second;
    gens.push_back(std::move(g));
    const Gen* p = &gens.back();
    by_key.emplace(p->key, p);
    return p;
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

bool gen_less(const Gen* a, const Gen* b) { return a != b && a->key < b->key; }

long long ll_lcm(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace

const Gen* symbol_gen(const Expr& sym) {
  Gen g{GenKind::Symbol, std::string("0") + sym.name() + (sym.role() == Role::Constant ? "" : "\x01"), sym, Fn::Exp, Expr(), 1};
  return registry().intern(std::move(g));
}

const Gen* float_gen(double v) {
  Expr f = Expr::flt(v);
  Gen g{GenKind::Float, "1" + render(f), f, Fn::Exp, Expr(), 1};
  return registry().intern(std::move(g));
}

const Gen* kernel_gen(Fn fn, const Expr& arg) {
  Expr atom = Expr::apply(fn, arg);
  Gen g{GenKind::Kernel, "2" + render(atom), atom, fn, Expr(), 1};
  g.fn = fn;
  return registry().intern(std::move(g));
}

const Gen* root_gen(const Expr& base, long long index) {
  Expr atom = Expr::power(base, Expr::fraction(1, index));
  Gen g{GenKind::Root, "3" + render(base) + "#" + std::to_string(index), atom, Fn::Exp, base, index};
  g.base = base;
  g.index = index;
  return registry().intern(std::move(g));
}

const Gen* imag_gen() {
  static const Gen* g = [] {
    Gen x{GenKind::Root, "3I", Expr::imag(), Fn::Exp, Expr::integer(-1), 2};
    x.base = Expr::integer(-1);
    x.index = 2;
    return registry().intern(std::move(x));
  }();
  return g;
}

Exp Monomial::degree(const Gen* g) const {
  for (const auto& [h, e] : f)
    if (h == g) return e;
  return Exp(0);
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.f.reserve(a.f.size() + b.f.size());
  std::size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (j == b.f.size() || (i < a.f.size() && gen_less(a.f[i].first, b.f[j].first))) {
      r.f.push_back(a.f[i++]);
    } else if (i == a.f.size() || gen_less(b.f[j].first, a.f[i].first)) {
      r.f.push_back(b.f[j++]);
    } else {
      Exp e = a.f[i].second + b.f[j].second;
      if (e != Exp(0)) r.f.emplace_back(a.f[i].first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial mono_pow(const Monomial& a, const Exp& e) {
  Monomial r;
  if (e == Exp(0)) return r;
  for (const auto& [g, x] : a.f) r.f.emplace_back(g, x * e);
  return r;
}

Monomial mono_single(const Gen* g, const Exp& e) {
  Monomial m;
  if (e != Exp(0)) m.f.emplace_back(g, e);
  return m;
}

bool MonoGreater::operator()(const Monomial& a, const Monomial& b) const {
  std::size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (j == b.f.size() || (i < a.f.size() && gen_less(a.f[i].first, b.f[j].first))) {
      return a.f[i].second > Exp(0);
    }
    if (i == a.f.size() || gen_less(b.f[j].first, a.f[i].first)) {
      return b.f[j].second < Exp(0);
    }
    if (a.f[i].second != b.f[j].second) return a.f[i].second > b.f[j].second;
    ++i;
    ++j;
  }
  return false;
}

Poly Poly::constant(const Rational& c) {
  Poly p;
  if (c != 0) p.t_.emplace(Monomial{}, c);
  return p;
}

Poly Poly::gen(const Gen* g, const Exp& e) { return term(Rational(1), mono_single(g, e)); }

Poly Poly::term(const Rational& c, Monomial m) {
  Poly p;
  if (c != 0) p.t_.emplace(std::move(m), c);
  return p;
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

Rational Poly::constant_value() const { return t_.empty() ? Rational(0) : t_.begin()->second; }

WorkMeter& work_meter() {
  thread_local WorkMeter m;
  return m;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  WorkMeter& w = work_meter();
  if (++w.used > w.limit) throw BudgetExceeded();
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
    if (t_.size() > kMaxTerms) throw BudgetExceeded();
  } else {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.t_) r.add_term(m, c);
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.t_) r.add_term(m, -c);
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  if (a.t_.size() * b.t_.size() > kMaxTerms * 40) throw BudgetExceeded();
  for (const auto& [ma, ca] : a.t_)
    for (const auto& [mb, cb] : b.t_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

Poly Poly::scaled(const Rational& k) const {
  if (k == 0) return Poly();
  Poly r = *this;
  for (auto& [m, c] : r.t_) c *= k;
  return r;
}

Poly Poly::times(const Monomial& m) const {
  if (m.empty()) return *this;
  Poly r;
  for (const auto& [mm, c] : t_) r.t_.emplace(mono_mul(mm, m), c);
  return r;
}

std::vector<const Gen*> Poly::gens() const {
  std::vector<const Gen*> out;
  for (const auto& [m, c] : t_)
    for (const auto& [g, e] : m.f)
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  std::sort(out.begin(), out.end(), gen_less);
  return out;
}

Poly poly_pow(const Poly& p, unsigned long n) {
  Poly r = Poly::constant(1);
  Poly b = p;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

// ---------------------------------------------------------------- division

namespace {

bool mono_divides(const Monomial& a, const Monomial& b, Monomial& q) {
  // q = b / a, all exponents nonnegative
  q = mono_mul(b, mono_pow(a, Exp(-1)));
  for (const auto& [g, e] : q.f)
    if (e < Exp(0)) return false;
  return true;
}

Exp poly_min_degree(const Poly& p, const Gen* g) {
  bool first = true;
  Exp m(0);
  for (const auto& [mono, c] : p.terms()) {
    Exp e = mono.degree(g);
    if (first || e < m) m = e;
    first = false;
  }
  return m;
}

long long degree_in(const Poly& p, const Gen* g) {
  long long d = -1;
  for (const auto& [m, c] : p.terms()) d = std::max<long long>(d, boost::rational_cast<long long>(m.degree(g)));
  return d;
}

std::map<long long, Poly> coeffs_in(const Poly& p, const Gen* g) {
  std::map<long long, Poly> out;
  for (const auto& [m, c] : p.terms()) {
    Exp e = m.degree(g);
    Monomial rest;
    for (const auto& f : m.f)
      if (f.first != g) rest.f.push_back(f);
    out[boost::rational_cast<long long>(e)].add_term(rest, c);
  }
  return out;
}

Poly lead_coeff_in(const Poly& p, const Gen* g) { return coeffs_in(p, g).rbegin()->second; }

Monomial mono_content(const Poly& p) {
  Monomial m;
  for (const Gen* g : p.gens()) {
    Exp e = poly_min_degree(p, g);
    if (e != Exp(0)) m.f.emplace_back(g, e);
  }
  return m;
}

// Integer-primitive with positive leading coefficient.
Poly unit_normal(const Poly& p) {
  if (p.is_zero()) return p;
  Integer l = 1, g = 0;
  for (const auto& [m, c] : p.terms()) l = boost::multiprecision::lcm(l, denominator(c));
  for (const auto& [m, c] : p.terms()) g = boost::multiprecision::gcd(g, Integer(numerator(c) * (l / denominator(c))));
  Rational k = Rational(l) / Rational(g);
  if (p.lead_coef() < 0) k = -k;
  return p.scaled(k);
}

Poly prem(const Poly& a, const Poly& b, const Gen* g) {
  long long db = degree_in(b, g);
  Poly lb = lead_coeff_in(b, g);
  Poly r = a;
  long long dr;
  while (!r.is_zero() && (dr = degree_in(r, g)) >= db) {
    Poly lr = lead_coeff_in(r, g);
    r = lb * r - (lr * b).times(mono_single(g, Exp(dr - db)));
  }
  return r;
}

Poly content_in(const Poly& p, const Gen* g) {
  auto cs = coeffs_in(p, g);
  Poly c;
  for (auto& [d, q] : cs) {
    c = poly_gcd(c, q);
    if (c.is_constant()) return Poly::constant(1);
  }
  return c;
}

Poly primitive_in(const Poly& p, const Gen* g) {
  Poly c = content_in(p, g);
  if (c.is_constant()) return unit_normal(p);
  return unit_normal(exact_divide(p, c));
}

}  // namespace

Poly exact_divide(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  if (b.is_constant()) return a.scaled(Rational(1) / b.constant_value());
  Poly q, r = a;
  const Monomial& lb = b.lead_mono();
  const Rational& cb = b.lead_coef();
  while (!r.is_zero()) {
    Monomial m;
    if (!mono_divides(lb, r.lead_mono(), m)) throw std::logic_error("inexact polynomial division");
    Rational c = r.lead_coef() / cb;
    q.add_term(m, c);
    r = r - b.times(m).scaled(c);
  }
  return q;
}

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return unit_normal(b);
  if (b.is_zero()) return unit_normal(a);
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);

  Monomial ma = mono_content(a), mb = mono_content(b);
  Monomial mg;
  {
    std::size_t i = 0, j = 0;
    while (i < ma.f.size() && j < mb.f.size()) {
      if (ma.f[i].first == mb.f[j].first) {
        mg.f.emplace_back(ma.f[i].first, std::min(ma.f[i].second, mb.f[j].second));
        ++i;
        ++j;
      } else if (gen_less(ma.f[i].first, mb.f[j].first)) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  Poly pa = ma.empty() ? a : a.times(mono_pow(ma, Exp(-1)));
  Poly pb = mb.empty() ? b : b.times(mono_pow(mb, Exp(-1)));
  if (pa.is_constant() || pb.is_constant()) return Poly::term(1, mg);

  // A generator present in only one argument cannot divide the gcd: fold
  // the gcd over that argument's coefficients in it instead.
  std::vector<const Gen*> ga = pa.gens(), gb = pb.gens();
  for (int side = 0; side < 2; ++side) {
    const Poly& p = side ? pb : pa;
    const Poly& q = side ? pa : pb;
    const auto& mine = side ? gb : ga;
    const auto& other = side ? ga : gb;
    for (const Gen* x : mine) {
      if (std::find(other.begin(), other.end(), x) != other.end()) continue;
      Poly r = q;
      for (auto& [d, cf] : coeffs_in(p, x)) {
        r = poly_gcd(r, cf);
        if (r.is_constant()) break;
      }
      return unit_normal(r.times(mg));
    }
  }

  // Recurse on the shared generator of lowest degree.
  const Gen* g = nullptr;
  long long best = 0;
  for (const Gen* x : ga) {
    long long dx = std::max(degree_in(pa, x), degree_in(pb, x));
    if (!g || dx < best || (dx == best && gen_less(x, g))) {
      g = x;
      best = dx;
    }
  }

  Poly ca = content_in(pa, g), cb = content_in(pb, g);
  Poly c = poly_gcd(ca, cb);
  Poly qa = ca.is_constant() ? pa : exact_divide(pa, ca);
  Poly qb = cb.is_constant() ? pb : exact_divide(pb, cb);

  Poly h = Poly::constant(1);
  if (degree_in(qa, g) > 0 && degree_in(qb, g) > 0) {
    if (degree_in(qa, g) < degree_in(qb, g)) std::swap(qa, qb);
    for (;;) {
      Poly r = prem(qa, qb, g);
      if (r.is_zero()) {
        h = primitive_in(qb, g);
        break;
      }
      if (degree_in(r, g) == 0) break;
      qa = qb;
      qb = primitive_in(r, g);
    }
  }
  return unit_normal((c * h).times(mg));
}

// ---------------------------------------------------------------- RatFunc

namespace {

bool needs_root_reduction(const Poly& p) {
  for (const auto& [m, c] : p.terms())
    for (const auto& [g, e] : m.f)
      if (g->kind == GenKind::Root && (e.denominator() != 1 || e < Exp(0) || e >= Exp(g->index))) return true;
  return false;
}

RatFunc reduce_roots(const Poly& p) {
  RatFunc out;
  for (const auto& [m, c] : p.terms()) {
    RatFunc t = RatFunc::constant(c);
    Monomial rest;
    for (const auto& [g, e] : m.f) {
      if (g->kind != GenKind::Root) {
        rest.f.emplace_back(g, e);
        continue;
      }
      if (e.denominator() != 1) throw std::logic_error("fractional power of a radical generator");
      long long n = e.numerator(), q = g->index;
      long long r = ((n % q) + q) % q;
      long long f = (n - r) / q;
      if (r) rest.f.emplace_back(g, Exp(r));
      if (f) t = t * rat_pow(to_rat(g->base), f);
    }
    out = out + t * RatFunc(Poly::term(1, rest));
  }
  return out;
}

void rescale(Poly& p, const std::map<const Gen*, long long>& s, bool up) {
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    Monomial mm = m;
    for (auto& [g, e] : mm.f) {
      auto it = s.find(g);
      if (it != s.end()) e = up ? e * it->second : e / it->second;
    }
    r.add_term(mm, c);
  }
  p = std::move(r);
}

}  // namespace

RatFunc::RatFunc(Poly n) : den_(Poly::constant(1)) { *this = make(std::move(n), Poly::constant(1)); }

RatFunc RatFunc::make(Poly n, Poly d) { return normalize(std::move(n), std::move(d), false); }

RatFunc RatFunc::make_coprime(Poly n, Poly d) { return normalize(std::move(n), std::move(d), true); }

RatFunc RatFunc::normalize(Poly n, Poly d, bool coprime) {
  if (d.is_zero()) throw std::domain_error("division by zero");
  RatFunc r;
  if (n.is_zero()) return r;
  if (needs_root_reduction(n) || needs_root_reduction(d)) return reduce_roots(n) / reduce_roots(d);
  // Keep radicals out of the denominator: conjugate square roots, complete
  // monomial powers of higher roots.
  for (const Gen* g : d.gens()) {
    if (g->kind != GenKind::Root) continue;
    auto cs = coeffs_in(d, g);
    if (g->index == 2) {
      Poly a = cs.count(0) ? cs[0] : Poly();
      Poly b = cs[1];
      RatFunc dd = RatFunc(a * a) - RatFunc(b * b) * to_rat(g->base);
      if (dd.is_zero()) continue;
      Poly conj = a - b.times(mono_single(g, Exp(1)));
      return RatFunc(n * conj) / dd;
    }
    if (cs.size() == 1) {
      Monomial m = mono_single(g, Exp(g->index - cs.begin()->first));
      return make(n.times(m), d.times(m));
    }
  }
  if (d.is_constant()) {
    r.num_ = n.scaled(Rational(1) / d.constant_value());
    Monomial shift = mono_content(r.num_);
    bool negative = false;
    for (const auto& [g, e] : shift.f)
      if (e < Exp(0)) negative = true;
    if (!negative) return r;
  }

  // Shift exponents so that num and den are polynomials with no common monomial factor.
  std::vector<const Gen*> gs = n.gens();
  for (const Gen* g : d.gens())
    if (std::find(gs.begin(), gs.end(), g) == gs.end()) gs.push_back(g);
  Monomial shift;
  for (const Gen* g : gs) {
    Exp e = std::min(poly_min_degree(n, g), poly_min_degree(d, g));
    if (e != Exp(0)) shift.f.emplace_back(g, -e);
  }
  std::sort(shift.f.begin(), shift.f.end(), [](const auto& x, const auto& y) { return gen_less(x.first, y.first); });
  if (!shift.empty()) {
    n = n.times(shift);
    d = d.times(shift);
  }

  if (!coprime && !n.is_monomial() && !d.is_monomial()) {
    std::map<const Gen*, long long> scale;
    for (const Poly* p : {&n, &d})
      for (const auto& [m, c] : p->terms())
        for (const auto& [g, e] : m.f)
          if (e.denominator() != 1) scale[g] = ll_lcm(scale.count(g) ? scale[g] : 1, e.denominator());
    if (!scale.empty()) {
      rescale(n, scale, true);
      rescale(d, scale, true);
    }
    Poly g = poly_gcd(n, d);
    if (!g.is_constant()) {
      n = exact_divide(n, g);
      d = exact_divide(d, g);
    }
    if (!scale.empty()) {
      rescale(n, scale, false);
      rescale(d, scale, false);
    }
  }

  if (d.is_constant()) {
    r.num_ = n.scaled(Rational(1) / d.constant_value());
    return r;
  }
  Integer l = 1, gg = 0;
  for (const Poly* p : {&n, &d})
    for (const auto& [m, c] : p->terms()) l = boost::multiprecision::lcm(l, denominator(c));
  for (const Poly* p : {&n, &d})
    for (const auto& [m, c] : p->terms()) gg = boost::multiprecision::gcd(gg, Integer(numerator(c) * (l / denominator(c))));
  Rational k = Rational(l) / Rational(gg);
  if (d.lead_coef() < 0) k = -k;
  r.num_ = n.scaled(k);
  r.den_ = d.scaled(k);
  return r;
}

namespace {

bool has_roots(const Poly& p) {
  for (const Gen* g : p.gens())
    if (g->kind == GenKind::Root) return true;
  return false;
}

// g = gcd(a, b) with cofactors a/g and b/g, for polynomials whose exponents
// may be negative or fractional.
struct GcdParts {
  Poly g, a, b;
};

GcdParts gcd_parts(const Poly& a, const Poly& b) {
  if (a.is_monomial() || b.is_monomial()) return {Poly::constant(1), a, b};
  std::map<const Gen*, long long> scale;
  for (const Poly* p : {&a, &b})
    for (const auto& [m, c] : p->terms())
      for (const auto& [g, e] : m.f)
        if (e.denominator() != 1) scale[g] = ll_lcm(scale.count(g) ? scale[g] : 1, e.denominator());
  Poly sa = a, sb = b;
  if (!scale.empty()) {
    rescale(sa, scale, true);
    rescale(sb, scale, true);
  }
  Monomial ma = mono_pow(mono_content(sa), Exp(-1)), mb = mono_pow(mono_content(sb), Exp(-1));
  sa = sa.times(ma);
  sb = sb.times(mb);
  Poly g = poly_gcd(sa, sb);
  if (g.is_constant()) return {Poly::constant(1), a, b};
  sa = exact_divide(sa, g).times(mono_pow(ma, Exp(-1)));
  sb = exact_divide(sb, g).times(mono_pow(mb, Exp(-1)));
  if (!scale.empty()) {
    rescale(sa, scale, false);
    rescale(sb, scale, false);
    rescale(g, scale, false);
  }
  return {g, sa, sb};
}

}  // namespace

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return RatFunc::make(a.num_ + b.num_, a.den_);
  if (a.den_.is_constant() || b.den_.is_constant() || has_roots(a.den_) || has_roots(b.den_) ||
      has_roots(a.num_) || has_roots(b.num_))
    return RatFunc::make(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  // With reduced summands only factors of gcd(a.den, b.den) can cancel.
  GcdParts dd = gcd_parts(a.den_, b.den_);
  Poly n = a.num_ * dd.b + b.num_ * dd.a;
  Poly d = dd.a * b.den_;
  if (n.is_zero()) return RatFunc();
  if (dd.g.is_constant()) return RatFunc::make_coprime(std::move(n), std::move(d));
  GcdParts c = gcd_parts(n, dd.g);
  if (c.g.is_constant()) return RatFunc::make_coprime(std::move(n), std::move(d));
  return RatFunc::make_coprime(std::move(c.a), exact_divide(d, c.g));
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

namespace {

RatFunc cross_multiply(const Poly& an, const Poly& ad, const Poly& bn, const Poly& bd) {
  if (has_roots(an) || has_roots(ad) || has_roots(bn) || has_roots(bd)) return RatFunc::make(an * bn, ad * bd);
  GcdParts x = gcd_parts(an, bd), y = gcd_parts(bn, ad);
  return RatFunc::make_coprime(x.a * y.a, y.b * x.b);
}

}  // namespace

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return RatFunc();
  return cross_multiply(a.num_, a.den_, b.num_, b.den_);
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (a.is_zero()) return RatFunc();
  return cross_multiply(a.num_, a.den_, b.den_, b.num_);
}

RatFunc rat_pow(const RatFunc& r, long long n) {
  if (n == 0) return RatFunc::constant(1);
  if (n < 0) {
    if (r.is_zero()) throw std::domain_error("division by zero");
    return RatFunc::make(poly_pow(r.den(), static_cast<unsigned long>(-n)), poly_pow(r.num(), static_cast<unsigned long>(-n)));
  }
  return RatFunc::make(poly_pow(r.num(), static_cast<unsigned long>(n)), poly_pow(r.den(), static_cast<unsigned long>(n)));
}

}  // namespace nlsym::detail
