#include <cctype>
#include <cstdlib>

#include "nlsym/expr.hpp"

namespace nlsym {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;
  bool is_float = false;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      bool is_float = false;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        is_float = true;
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          is_float = true;
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, s.substr(start, i - start), start, is_float});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    Tok t;
    switch (c) {
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '^': t = Tok::Caret; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({t, std::string(1, c), i});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(const std::string& text, const SymbolTable& symbols) : toks_(tokenize(text)), symbols_(symbols) {}

  Expr run() {
    Expr e = parse_sum();
    if (peek().type != Tok::End) {
      if (peek().type == Tok::RParen) throw ParseError("unbalanced ')'", peek().pos);
      throw ParseError("unexpected '" + peek().text + "' (juxtaposition is not allowed; use '*')", peek().pos);
    }
    return e;
  }

private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_term()};
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      bool minus = next().type == Tok::Minus;
      Expr t = parse_term();
      terms.push_back(minus ? negate(t) : t);
    }
    return Expr::sum(std::move(terms));
  }

  Expr parse_term() {
    if (peek().type == Tok::Minus) {
      next();
      return negate(parse_term());
    }
    if (peek().type == Tok::Plus) {
      next();
      return parse_term();
    }
    std::vector<Expr> factors{parse_factor()};
    while (peek().type == Tok::Star || peek().type == Tok::Slash) {
      bool div = next().type == Tok::Slash;
      Expr f = parse_factor();
      if (!div) {
        factors.push_back(f);
        continue;
      }
      Expr lhs = Expr::product(std::move(factors));
      factors.clear();
      if (lhs.kind() == Kind::Number && f.kind() == Kind::Number && f.value() != 0)
        factors.push_back(Expr::number(lhs.value() / f.value()));
      else
        factors.push_back(Expr::quotient(lhs, f));
    }
    return Expr::product(std::move(factors));
  }

  Expr parse_factor() {
    if (peek().type == Tok::Minus) {
      next();
      return negate(parse_factor());
    }
    Expr base = parse_primary();
    if (peek().type != Tok::Caret) return base;
    next();
    Expr ex;
    if (peek().type == Tok::Minus) {
      next();
      ex = negate(parse_factor());
    } else {
      ex = parse_factor();
    }
    return Expr::power(base, ex);
  }

  Expr parse_primary() {
    const Token& t = next();
    switch (t.type) {
      case Tok::Number:
        if (t.is_float) return Expr::flt(std::strtod(t.text.c_str(), nullptr));
        return Expr::number(Rational(Integer(t.text)));
      case Tok::LParen: {
        Expr e = parse_sum();
        if (peek().type != Tok::RParen) throw ParseError("expected ')'", peek().pos);
        next();
        return e;
      }
      case Tok::Ident: {
        Fn f;
        if (fn_from_name(t.text, f)) {
          if (peek().type != Tok::LParen) throw ParseError("function '" + t.text + "' needs '('", peek().pos);
          next();
          Expr arg = parse_sum();
          if (peek().type != Tok::RParen) throw ParseError("expected ')'", peek().pos);
          next();
          return Expr::apply(f, arg);
        }
        if (peek().type == Tok::LParen) throw ParseError("unknown function '" + t.text + "'", t.pos);
        if (t.text == "I") return Expr::imag();
        if (symbols_.has_variable(t.text)) return Expr::variable(t.text);
        if (symbols_.has_constant(t.text)) return Expr::constant(t.text);
        throw ParseError("undeclared identifier '" + t.text + "'", t.pos);
      }
      case Tok::End:
        throw ParseError("unexpected end of input", t.pos);
      default:
        throw ParseError("unexpected '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  const SymbolTable& symbols_;
  std::size_t i_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const SymbolTable& symbols) {
  return Parser(text, symbols).run();
}

}  // namespace nlsym
