#pragma once

#include <string>
#include <vector>

#include "nlsym/expr.hpp"

namespace nlsym {

// Exact derivative, simplified.
Expr differentiate(const Expr& e, const std::string& var);

// Derivative before simplification; subtrees independent of var give 0.
Expr differentiate_raw(const Expr& e, const std::string& var);

// Repeated derivative along vars in order, simplified after each step.
Expr differentiate(const Expr& e, const std::vector<std::string>& vars);

}  // namespace nlsym
