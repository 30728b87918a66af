#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlsym/evaluate.hpp"
#include "nlsym/expr.hpp"

namespace nlsym {

struct Interval {
  std::string var;
  double lo = 0.0;
  double hi = 1.0;
};

enum class ConstraintKind { NonZero, Positive };

// A point is rejected when |expr| <= margin (NonZero) or expr <= margin (Positive).
struct Constraint {
  Expr expr;
  ConstraintKind kind = ConstraintKind::NonZero;
  double margin = 1e-6;
};

struct SampleDomain {
  std::vector<Interval> box;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::vector<Constraint> exclude;
  Bindings constants;
  bool complex = false;

  // Up to `count` accepted points drawn uniformly from the box, plus the
  // number of rejected draws. Draws stop after 4*count attempts.
  std::vector<Bindings> points(std::size_t* rejected = nullptr) const;
  bool admits(const Bindings& p) const;
};

struct EquivalenceReport {
  bool pass = false;
  double worst_error = 0.0;  // |a-b| / (1+|a|)
  Bindings worst_point;
  std::size_t samples = 0;
  std::size_t rejected = 0;
};

// |a-b| <= tol*(1+|a|) at every admitted sample. Samples where either side
// fails to evaluate are rejected. Throws std::runtime_error if none remain.
EquivalenceReport equivalent(const Expr& a, const Expr& b, const SampleDomain& dom, double tol);

// Worker count used by data-parallel loops; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

std::string describe_point(const Bindings& p);

}  // namespace nlsym
