#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace nlsym {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

enum class Kind { Number, Float, Symbol, Imag, Sum, Product, Power, Quotient, Apply };

enum class Fn { Exp, Ln, Sqrt, Sin, Cos, Sinh, Cosh, Tanh, LambertW };

enum class Role { Variable, Constant };

const char* fn_name(Fn f);
bool fn_from_name(const std::string& name, Fn& out);

class Node;

// Immutable expression handle. Copies share the underlying tree.
class Expr {
public:
  Expr();  // the number 0

  static Expr number(const Rational& q);
  static Expr integer(long long n);
  static Expr fraction(long long num, long long den);
  static Expr flt(double v);
  static Expr variable(const std::string& name);
  static Expr constant(const std::string& name);
  static Expr imag();
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, const Expr& exponent);
  static Expr quotient(const Expr& num, const Expr& den);
  static Expr apply(Fn f, const Expr& arg);

  Kind kind() const;
  const std::vector<Expr>& children() const;
  const Rational& value() const;     // Number
  double float_value() const;        // Float
  const std::string& name() const;   // Symbol
  Role role() const;                 // Symbol
  Fn fn() const;                     // Apply

  bool is_number() const { return kind() == Kind::Number; }
  bool is_zero() const;
  bool is_one() const;
  bool is_symbol(const std::string& n) const;

  std::size_t hash() const;
  const Node* raw() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Builders that flatten one level; they do not simplify.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& b, const Expr& e);
Expr pow(const Expr& b, long long n);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr tanh(const Expr& a);
Expr cosh(const Expr& a);
Expr sinh(const Expr& a);
Expr negate(const Expr& a);  // folds numeric constants

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Names of declared symbols available to the parser.
struct SymbolTable {
  std::vector<std::string> variables;
  std::vector<std::string> constants;

  static SymbolTable with(std::vector<std::string> vars, std::vector<std::string> consts = {});
  bool has_variable(const std::string& n) const;
  bool has_constant(const std::string& n) const;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos);
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

class EvalError : public std::runtime_error {
public:
  EvalError(const std::string& msg, const std::string& subtree);
  const std::string& subtree() const { return subtree_; }

private:
  std::string subtree_;
};

// Grammar (whitespace ignored, juxtaposition is an error):
//   sum     := term (('+' | '-') term)*
//   term    := '-' term | factor (('*' | '/') factor)*
//   factor  := '-' factor | primary ('^' ('-' factor | factor))?
//   primary := number | ident | ident '(' sum ')' | '(' sum ')'
//   number  := digits ('.' digits)? ([eE] [+-]? digits)?
// Integer literals are exact; literals with '.' or an exponent are floats.
// Function names: exp ln log sqrt sin cos sinh cosh tanh lambertW. 'I' is the
// imaginary unit.
Expr parse_expr(const std::string& text, const SymbolTable& symbols);

std::string render(const Expr& e);

std::set<std::string> free_symbols(const Expr& e);
std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, const std::string& name);
std::size_t node_count(const Expr& e);

// Simultaneous replacement of symbols by name.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

}  // namespace nlsym
