#include "nlsym/calculus.hpp"

#include "nlsym/simplify.hpp"

namespace nlsym {

namespace {

Expr zero() { return Expr::integer(0); }
Expr one() { return Expr::integer(1); }

Expr d(const Expr& e, const std::string& v);

Expr d_apply(const Expr& e, const std::string& v) {
  const Expr& a = e.children()[0];
  Expr da = d(a, v);
  if (da.is_zero()) return zero();
  Expr outer;
  switch (e.fn()) {
    case Fn::Exp: outer = e; break;
    case Fn::Ln: outer = one() / a; break;
    case Fn::Sqrt: outer = one() / (Expr::integer(2) * e); break;
    case Fn::Sin: outer = Expr::apply(Fn::Cos, a); break;
    case Fn::Cos: outer = negate(Expr::apply(Fn::Sin, a)); break;
    case Fn::Sinh: outer = Expr::apply(Fn::Cosh, a); break;
    case Fn::Cosh: outer = Expr::apply(Fn::Sinh, a); break;
    case Fn::Tanh: outer = one() - pow(e, 2); break;
    case Fn::LambertW: outer = e / (a * (one() + e)); break;
  }
  return outer * da;
}

Expr d(const Expr& e, const std::string& v) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Float:
    case Kind::Imag:
      return zero();
    case Kind::Symbol:
      return e.name() == v ? one() : zero();
    case Kind::Sum: {
      std::vector<Expr> t;
      for (const auto& c : e.children()) {
        Expr x = d(c, v);
        if (!x.is_zero()) t.push_back(x);
      }
      return Expr::sum(std::move(t));
    }
    case Kind::Product: {
      const auto& f = e.children();
      std::vector<Expr> t;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr x = d(f[i], v);
        if (x.is_zero()) continue;
        std::vector<Expr> p;
        for (std::size_t j = 0; j < f.size(); ++j) p.push_back(j == i ? x : f[j]);
        t.push_back(Expr::product(std::move(p)));
      }
      return Expr::sum(std::move(t));
    }
    case Kind::Quotient: {
      const Expr& a = e.children()[0];
      const Expr& b = e.children()[1];
      Expr da = d(a, v), db = d(b, v);
      if (db.is_zero()) return da.is_zero() ? zero() : da / b;
      return (da * b - a * db) / pow(b, 2);
    }
    case Kind::Power: {
      const Expr& b = e.children()[0];
      const Expr& x = e.children()[1];
      Expr db = d(b, v), dx = d(x, v);
      if (dx.is_zero()) {
        if (db.is_zero()) return zero();
        Expr ex = x.kind() == Kind::Number ? Expr::number(x.value() - 1) : x - one();
        return x * pow(b, ex) * db;
      }
      return e * (dx * Expr::apply(Fn::Ln, b) + x * db / b);
    }
    case Kind::Apply:
      return d_apply(e, v);
  }
  return zero();
}

}  // namespace

Expr differentiate_raw(const Expr& e, const std::string& var) { return d(e, var); }

Expr differentiate(const Expr& e, const std::string& var) { return simplify(d(e, var)); }

Expr differentiate(const Expr& e, const std::vector<std::string>& vars) {
  Expr r = e;
  for (const auto& v : vars) r = differentiate(r, v);
  return r;
}

}  // namespace nlsym
