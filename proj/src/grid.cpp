#include "nlsym/grid.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nlsym/sample.hpp"

namespace nlsym {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in " + what);
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Axis parse_axis(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 4 || parts[0].empty())
    throw std::invalid_argument("grid axis must be var:min:max:n, got '" + text + "'");
  Axis a;
  a.var = parts[0];
  a.min = to_double(parts[1], "axis " + text);
  a.max = to_double(parts[2], "axis " + text);
  double n = to_double(parts[3], "axis " + text);
  if (n < 2 || n != std::floor(n)) throw std::invalid_argument("axis point count must be an integer >= 2: " + text);
  if (!(a.max > a.min)) throw std::invalid_argument("axis max must exceed min: " + text);
  a.n = static_cast<std::size_t>(n);
  return a;
}

GridFunction::GridFunction(std::vector<Axis> axes, double fill) : axes_(std::move(axes)) {
  std::size_t total = 1;
  for (const auto& a : axes_) {
    if (a.n < 1) throw std::invalid_argument("empty grid axis " + a.var);
    total *= a.n;
  }
  values_.assign(total, fill);
}

GridFunction GridFunction::sample(const Expr& e, std::vector<Axis> axes, const Bindings& constants) {
  GridFunction g(std::move(axes));
  std::vector<std::string> slots;
  for (const auto& a : g.axes_) slots.push_back(a.var);
  CompiledExpr f(e, slots, constants);
  std::size_t inner = g.axes_.empty() ? 1 : g.axes_.back().n;
  std::size_t rows = g.size() / inner;
  parallel_for(rows, [&](std::size_t r) {
    for (std::size_t k = 0; k < inner; ++k) {
      std::size_t i = r * inner + k;
      std::vector<double> x = g.coords(i);
      double v = f(x);
      g.values_[i] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
    }
  });
  return g;
}

std::size_t GridFunction::flat(const std::vector<std::size_t>& idx) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) f = f * axes_[k].n + idx[k];
  return f;
}

std::vector<std::size_t> GridFunction::index(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    idx[k] = flat % axes_[k].n;
    flat /= axes_[k].n;
  }
  return idx;
}

std::vector<double> GridFunction::coords(std::size_t flat) const {
  auto idx = index(flat);
  std::vector<double> x(axes_.size());
  for (std::size_t k = 0; k < axes_.size(); ++k) x[k] = axes_[k].at(idx[k]);
  return x;
}

Bindings GridFunction::point(std::size_t flat) const {
  auto x = coords(flat);
  Bindings b;
  for (std::size_t k = 0; k < axes_.size(); ++k) b[axes_[k].var] = x[k];
  return b;
}

double GridFunction::max_abs(std::size_t* where) const {
  double best = 0.0;
  std::size_t at = values_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double v = std::fabs(values_[i]);
    if (std::isnan(v)) continue;
    if (at == values_.size() || v > best) {
      best = v;
      at = i;
    }
  }
  if (where) *where = at;
  return best;
}

std::size_t GridFunction::masked() const {
  std::size_t m = 0;
  for (double v : values_)
    if (std::isnan(v)) ++m;
  return m;
}

void GridFunction::write_csv(std::ostream& out) const {
  out << "# nlsym grid\n";
  for (const auto& a : axes_) out << "# axis," << a.var << ',' << fmt(a.min) << ',' << fmt(a.max) << ',' << a.n << '\n';
  for (const auto& a : axes_) out << a.var << ',';
  out << "value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (double x : coords(i)) out << fmt(x) << ',';
    out << fmt(values_[i]) << '\n';
  }
}

GridFunction GridFunction::read_csv(std::istream& in) {
  std::string line;
  std::vector<Axis> axes;
  bool header = false;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# axis,", 0) == 0) {
        auto p = split(line.substr(7), ',');
        if (p.size() != 4) throw std::invalid_argument("bad axis line: " + line);
        Axis a;
        a.var = p[0];
        a.min = to_double(p[1], line);
        a.max = to_double(p[2], line);
        a.n = static_cast<std::size_t>(to_double(p[3], line));
        axes.push_back(a);
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    auto p = split(line, ',');
    if (p.size() != axes.size() + 1) throw std::invalid_argument("bad grid row: " + line);
    vals.push_back(p.back() == "nan" ? std::numeric_limits<double>::quiet_NaN() : to_double(p.back(), line));
  }
  if (axes.empty()) throw std::invalid_argument("grid file has no axis lines");
  GridFunction g(axes);
  if (vals.size() != g.size())
    throw std::invalid_argument("grid file has " + std::to_string(vals.size()) + " rows, expected " + std::to_string(g.size()));
  g.values_ = std::move(vals);
  return g;
}

}  // namespace nlsym
