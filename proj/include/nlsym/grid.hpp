#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlsym/evaluate.hpp"
#include "nlsym/expr.hpp"

namespace nlsym {

struct Axis {
  std::string var;
  double min = 0.0;
  double max = 1.0;
  std::size_t n = 2;

  double h() const { return n > 1 ? (max - min) / static_cast<double>(n - 1) : 0.0; }
  double at(std::size_t i) const { return min + h() * static_cast<double>(i); }
};

// Parses "var:min:max:n".
Axis parse_axis(const std::string& text);

// Samples on a rectangular grid, row-major with the last axis fastest.
// NaN marks a masked sample.
class GridFunction {
public:
  GridFunction() = default;
  explicit GridFunction(std::vector<Axis> axes, double fill = 0.0);

  // Samples e at every grid point; evaluation failures become NaN.
  static GridFunction sample(const Expr& e, std::vector<Axis> axes, const Bindings& constants = {});

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t dims() const { return axes_.size(); }
  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t flat(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> index(std::size_t flat) const;
  std::vector<double> coords(std::size_t flat) const;
  Bindings point(std::size_t flat) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Largest finite |value| and its flat index; index is size() when none.
  double max_abs(std::size_t* where = nullptr) const;
  std::size_t masked() const;

  // CSV layout:
  //   # nlsym grid
  //   # axis,<var>,<min>,<max>,<n>      one line per axis, in order
  //   <var0>,...,<varK>,value           header
  //   one row per sample in row-major order; masked samples print "nan"
  void write_csv(std::ostream& out) const;
  static GridFunction read_csv(std::istream& in);

private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

}  // namespace nlsym
