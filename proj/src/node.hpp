#pragma once

#include "nlsym/expr.hpp"

namespace nlsym {

class Node {
public:
  Kind kind = Kind::Number;
  Rational value;
  double fvalue = 0.0;
  std::string name;
  Role role = Role::Variable;
  Fn fn = Fn::Exp;
  std::vector<Expr> children;
  std::size_t hash = 0;
};

}  // namespace nlsym
