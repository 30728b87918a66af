#include "nlsym/sample.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace nlsym {

namespace {

std::atomic<unsigned> g_threads{1};

}  // namespace

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
  unsigned n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string describe_point(const Bindings& p) {
  std::string s;
  char buf[64];
  for (const auto& [k, v] : p) {
    if (!s.empty()) s += ", ";
    if (v.imag() == 0.0)
      std::snprintf(buf, sizeof buf, "%.6g", v.real());
    else
      std::snprintf(buf, sizeof buf, "%.6g%+.6gi", v.real(), v.imag());
    s += k + "=" + buf;
  }
  return s;
}

bool SampleDomain::admits(const Bindings& p) const {
  EvalOptions opt{complex};
  for (const auto& c : exclude) {
    Complex v;
    try {
      v = evaluate(c.expr, p, opt);
    } catch (const EvalError&) {
      return false;
    }
    if (c.kind == ConstraintKind::NonZero && std::abs(v) <= c.margin) return false;
    if (c.kind == ConstraintKind::Positive && !(v.real() > c.margin)) return false;
  }
  return true;
}

std::vector<Bindings> SampleDomain::points(std::size_t* rejected) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Bindings> out;
  std::size_t rej = 0;
  for (std::size_t attempt = 0; attempt < 4 * count && out.size() < count; ++attempt) {
    Bindings p = constants;
    for (const auto& iv : box) p[iv.var] = Complex(iv.lo + (iv.hi - iv.lo) * unit(rng), 0.0);
    if (admits(p))
      out.push_back(std::move(p));
    else
      ++rej;
  }
  if (rejected) *rejected = rej;
  return out;
}

EquivalenceReport equivalent(const Expr& a, const Expr& b, const SampleDomain& dom, double tol) {
  EquivalenceReport rep;
  std::vector<Bindings> pts = dom.points(&rep.rejected);
  EvalOptions opt{dom.complex};
  rep.pass = true;
  bool any = false;
  for (const auto& p : pts) {
    Complex va, vb;
    try {
      va = evaluate(a, p, opt);
      vb = evaluate(b, p, opt);
    } catch (const EvalError&) {
      ++rep.rejected;
      continue;
    }
    ++rep.samples;
    double err = std::abs(va - vb) / (1.0 + std::abs(va));
    if (!any || err > rep.worst_error) {
      rep.worst_error = err;
      rep.worst_point = p;
    }
    any = true;
  }
  if (rep.samples == 0) throw std::runtime_error("equivalent: all samples rejected");
  rep.pass = rep.worst_error <= tol;
  return rep;
}

}  // namespace nlsym
