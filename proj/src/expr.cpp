#include "nlsym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "node.hpp"

namespace nlsym {

namespace {

const char* const kFnNames[] = {"exp", "ln", "sqrt", "sin", "cos", "sinh", "cosh", "tanh", "lambertW"};

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::shared_ptr<Node> make_node(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

void finish_hash(Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1000003u;
  switch (n.kind) {
    case Kind::Number:
      hash_combine(h, std::hash<std::string>{}(n.value.str()));
      break;
    case Kind::Float: {
      std::uint64_t bits;
      std::memcpy(&bits, &n.fvalue, sizeof bits);
      hash_combine(h, bits);
      break;
    }
    case Kind::Symbol:
      hash_combine(h, std::hash<std::string>{}(n.name));
      hash_combine(h, static_cast<std::size_t>(n.role));
      break;
    case Kind::Apply:
      hash_combine(h, static_cast<std::size_t>(n.fn));
      break;
    default:
      break;
  }
  for (const auto& c : n.children) hash_combine(h, c.hash());
  n.hash = h;
}

}  // namespace

const char* fn_name(Fn f) { return kFnNames[static_cast<int>(f)]; }

bool fn_from_name(const std::string& name, Fn& out) {
  for (int i = 0; i < 9; ++i) {
    if (name == kFnNames[i]) {
      out = static_cast<Fn>(i);
      return true;
    }
  }
  if (name == "log") {
    out = Fn::Ln;
    return true;
  }
  if (name == "LambertW") {
    out = Fn::LambertW;
    return true;
  }
  return false;
}

Expr::Expr() : Expr(Expr::integer(0)) {}

Expr Expr::number(const Rational& q) {
  auto n = make_node(Kind::Number);
  n->value = q;
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::integer(long long v) { return number(Rational(v)); }

Expr Expr::fraction(long long num, long long den) { return number(Rational(num) / Rational(den)); }

Expr Expr::flt(double v) {
  auto n = make_node(Kind::Float);
  n->fvalue = v;
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::variable(const std::string& name) {
  auto n = make_node(Kind::Symbol);
  n->name = name;
  n->role = Role::Variable;
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::constant(const std::string& name) {
  auto n = make_node(Kind::Symbol);
  n->name = name;
  n->role = Role::Constant;
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::imag() {
  auto n = make_node(Kind::Imag);
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return integer(0);
  if (terms.size() == 1) return terms.front();
  auto n = make_node(Kind::Sum);
  n->children = std::move(terms);
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return integer(1);
  if (factors.size() == 1) return factors.front();
  auto n = make_node(Kind::Product);
  n->children = std::move(factors);
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::power(const Expr& base, const Expr& exponent) {
  auto n = make_node(Kind::Power);
  n->children = {base, exponent};
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::quotient(const Expr& num, const Expr& den) {
  auto n = make_node(Kind::Quotient);
  n->children = {num, den};
  finish_hash(*n);
  return Expr(std::move(n));
}

Expr Expr::apply(Fn f, const Expr& arg) {
  auto n = make_node(Kind::Apply);
  n->fn = f;
  n->children = {arg};
  finish_hash(*n);
  return Expr(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
const Rational& Expr::value() const { return node_->value; }
double Expr::float_value() const { return node_->fvalue; }
const std::string& Expr::name() const { return node_->name; }
Role Expr::role() const { return node_->role; }
Fn Expr::fn() const { return node_->fn; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::is_zero() const { return kind() == Kind::Number && value() == 0; }
bool Expr::is_one() const { return kind() == Kind::Number && value() == 1; }
bool Expr::is_symbol(const std::string& n) const { return kind() == Kind::Symbol && name() == n; }

bool operator==(const Expr& a, const Expr& b) {
  const Node* x = a.raw();
  const Node* y = b.raw();
  if (x == y) return true;
  if (x->hash != y->hash || x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::Number:
      if (x->value != y->value) return false;
      break;
    case Kind::Float:
      if (!(x->fvalue == y->fvalue)) return false;
      break;
    case Kind::Symbol:
      if (x->name != y->name || x->role != y->role) return false;
      break;
    case Kind::Apply:
      if (x->fn != y->fn) return false;
      break;
    default:
      break;
  }
  if (x->children.size() != y->children.size()) return false;
  for (std::size_t i = 0; i < x->children.size(); ++i)
    if (!(x->children[i] == y->children[i])) return false;
  return true;
}

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Expr> t;
  if (a.kind() == Kind::Sum) t = a.children(); else t.push_back(a);
  if (b.kind() == Kind::Sum) t.insert(t.end(), b.children().begin(), b.children().end()); else t.push_back(b);
  return Expr::sum(std::move(t));
}

Expr negate(const Expr& a) {
  if (a.kind() == Kind::Number) return Expr::number(-a.value());
  if (a.kind() == Kind::Float) return Expr::flt(-a.float_value());
  return Expr::product({Expr::integer(-1), a});
}

Expr operator-(const Expr& a, const Expr& b) { return a + negate(b); }
Expr operator-(const Expr& a) { return negate(a); }

Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Expr> f;
  if (a.kind() == Kind::Product) f = a.children(); else f.push_back(a);
  if (b.kind() == Kind::Product) f.insert(f.end(), b.children().begin(), b.children().end()); else f.push_back(b);
  return Expr::product(std::move(f));
}

Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }
Expr pow(const Expr& b, const Expr& e) { return Expr::power(b, e); }
Expr pow(const Expr& b, long long n) { return Expr::power(b, Expr::integer(n)); }
Expr exp(const Expr& a) { return Expr::apply(Fn::Exp, a); }
Expr ln(const Expr& a) { return Expr::apply(Fn::Ln, a); }
Expr sqrt(const Expr& a) { return Expr::apply(Fn::Sqrt, a); }
Expr tanh(const Expr& a) { return Expr::apply(Fn::Tanh, a); }
Expr cosh(const Expr& a) { return Expr::apply(Fn::Cosh, a); }
Expr sinh(const Expr& a) { return Expr::apply(Fn::Sinh, a); }

SymbolTable SymbolTable::with(std::vector<std::string> vars, std::vector<std::string> consts) {
  SymbolTable t;
  t.variables = std::move(vars);
  t.constants = std::move(consts);
  return t;
}

bool SymbolTable::has_variable(const std::string& n) const {
  return std::find(variables.begin(), variables.end(), n) != variables.end();
}

bool SymbolTable::has_constant(const std::string& n) const {
  return std::find(constants.begin(), constants.end(), n) != constants.end();
}

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg), pos_(pos) {}

EvalError::EvalError(const std::string& msg, const std::string& subtree)
    : std::runtime_error(msg + " in `" + subtree + "`"), subtree_(subtree) {}

namespace {

void collect(const Expr& e, std::set<std::string>& out, bool vars_only) {
  if (e.kind() == Kind::Symbol) {
    if (!vars_only || e.role() == Role::Variable) out.insert(e.name());
    return;
  }
  for (const auto& c : e.children()) collect(c, out, vars_only);
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> s;
  collect(e, s, false);
  return s;
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> s;
  collect(e, s, true);
  return s;
}

bool depends_on(const Expr& e, const std::string& name) {
  if (e.kind() == Kind::Symbol) return e.name() == name;
  for (const auto& c : e.children())
    if (depends_on(c, name)) return true;
  return false;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children()) n += node_count(c);
  return n;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  if (e.kind() == Kind::Symbol) {
    auto it = bindings.find(e.name());
    return it == bindings.end() ? e : it->second;
  }
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  bool changed = false;
  for (const auto& c : e.children()) {
    kids.push_back(substitute(c, bindings));
    if (!(kids.back().raw() == c.raw())) changed = true;
  }
  if (!changed) return e;
  switch (e.kind()) {
    case Kind::Sum: return Expr::sum(std::move(kids));
    case Kind::Product: return Expr::product(std::move(kids));
    case Kind::Power: return Expr::power(kids[0], kids[1]);
    case Kind::Quotient: return Expr::quotient(kids[0], kids[1]);
    case Kind::Apply: return Expr::apply(e.fn(), kids[0]);
    default: return e;
  }
}

}  // namespace nlsym
