#pragma once

// Grid plumbing, cubic interpolation, and a deterministic parallel_for.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace heatlab {

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

// Parses "start:stop:count".
inline GridSpec parse_grid_spec(const std::string& text) {
  auto p1 = text.find(':');
  auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    throw std::invalid_argument("grid spec must be start:stop:count, got '" + text + "'");
  GridSpec g;
  std::size_t used = 0;
  g.start = std::stod(text.substr(0, p1), &used);
  g.stop = std::stod(text.substr(p1 + 1, p2 - p1 - 1), &used);
  g.count = std::stoi(text.substr(p2 + 1), &used);
  if (g.count < 1) throw std::invalid_argument("grid spec count must be >= 1");
  if (!(g.stop >= g.start)) throw std::invalid_argument("grid spec needs stop >= start");
  return g;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  if (n == 1) {
    xs[0] = a;
    return xs;
  }
  double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + h * i;
  xs.back() = b;
  return xs;
}

inline std::vector<double> to_vector(const GridSpec& g) { return linspace(g.start, g.stop, g.count); }

inline int env_thread_count() {
  if (const char* s = std::getenv("HEATLAB_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(i) for i in [0, n).  Results must go to index-addressed slots so
// the outcome is independent of the thread count.
template <class F>
inline void parallel_for(std::size_t n, F&& body) {
  int workers = std::min<std::size_t>(static_cast<std::size_t>(env_thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// 4-point Lagrange interpolation on a sorted abscissa table.
inline double interp_cubic(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("interp_cubic: bad table");
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::ptrdiff_t idx = it - xs.begin() - 1;
  std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xs.size());
  std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(idx - 1, 0, n - 4 < 0 ? 0 : n - 4);
  if (n < 4) lo = 0;
  std::ptrdiff_t m = std::min<std::ptrdiff_t>(4, n);
  double acc = 0.0;
  for (std::ptrdiff_t i = lo; i < lo + m; ++i) {
    double w = 1.0;
    for (std::ptrdiff_t j = lo; j < lo + m; ++j)
      if (j != i) w *= (x - xs[static_cast<std::size_t>(j)]) / (xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]);
    acc += w * ys[static_cast<std::size_t>(i)];
  }
  return acc;
}

}  // namespace heatlab
