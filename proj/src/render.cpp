#include <cmath>
#include <cstdio>

#include "nlsym/expr.hpp"

namespace nlsym {

namespace {

bool is_neg(const Expr& e) {
  if (e.kind() != Kind::Product || e.children().size() != 2) return false;
  const Expr& c = e.children()[0];
  Kind k = e.children()[1].kind();
  return c.kind() == Kind::Number && c.value() == -1 && k != Kind::Number && k != Kind::Float;
}

std::string wrap(const std::string& s) { return "(" + s + ")"; }

std::string number_text(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string float_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool plain_atom(const Expr& e) {
  switch (e.kind()) {
    case Kind::Symbol:
    case Kind::Imag:
    case Kind::Apply:
      return true;
    case Kind::Number:
      return e.value() >= 0 && denominator(e.value()) == 1;
    case Kind::Float:
      return e.float_value() >= 0;
    default:
      return false;
  }
}

std::string r(const Expr& e);

// Operand of a binary or unary minus inside a sum.
std::string term_text(const Expr& e) {
  if (e.kind() == Kind::Sum || is_neg(e)) return wrap(r(e));
  return r(e);
}

std::string factor_text(const Expr& e) {
  if (plain_atom(e) || e.kind() == Kind::Power) return r(e);
  return wrap(r(e));
}

std::string r(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return number_text(e.value());
    case Kind::Float:
      return float_text(e.float_value());
    case Kind::Symbol:
      return e.name();
    case Kind::Imag:
      return "I";
    case Kind::Apply:
      return std::string(fn_name(e.fn())) + "(" + r(e.children()[0]) + ")";
    case Kind::Sum: {
      const auto& t = e.children();
      std::string s = t[0].kind() == Kind::Sum ? wrap(r(t[0])) : r(t[0]);
      for (std::size_t i = 1; i < t.size(); ++i) {
        const Expr& x = t[i];
        if (is_neg(x)) {
          s += " - " + term_text(x.children()[1]);
        } else if (x.kind() == Kind::Number && x.value() < 0) {
          s += " - " + number_text(-x.value());
        } else if (x.kind() == Kind::Float && x.float_value() < 0) {
          s += " - " + float_text(-x.float_value());
        } else {
          s += " + " + term_text(x);
        }
      }
      return s;
    }
    case Kind::Product: {
      if (is_neg(e)) return "-" + term_text(e.children()[1]);
      std::string s;
      for (const auto& f : e.children()) {
        if (!s.empty()) s += "*";
        bool bare = plain_atom(f) || f.kind() == Kind::Power;
        s += bare ? r(f) : wrap(r(f));
      }
      return s;
    }
    case Kind::Quotient: {
      const Expr& n = e.children()[0];
      const Expr& d = e.children()[1];
      bool bare_num = (n.kind() == Kind::Product && !is_neg(n)) || n.kind() == Kind::Quotient || n.kind() == Kind::Power ||
                      plain_atom(n) || (n.kind() == Kind::Number && n.value() > 0);
      return (bare_num ? r(n) : wrap(r(n))) + "/" + factor_text(d);
    }
    case Kind::Power: {
      const Expr& b = e.children()[0];
      const Expr& x = e.children()[1];
      return (plain_atom(b) ? r(b) : wrap(r(b))) + "^" + (plain_atom(x) ? r(x) : wrap(r(x)));
    }
  }
  return "?";
}

}  // namespace

std::string render(const Expr& e) { return r(e); }

}  // namespace nlsym
