#pragma once

// Reference implementations written from the definitions, independent of the
// library code paths they check. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "czek/distance.hpp"
#include "czek/seriation.hpp"

namespace oracle {

using Row = std::vector<std::optional<double>>;

/// Mean absolute difference over coordinates observed in both rows.
inline double dd(const Row& x, const Row& y) {
  double sum = 0.0;
  int shared = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!x[r].has_value() || !y[r].has_value()) continue;
    sum += std::fabs(*x[r] - *y[r]);
    shared += 1;
  }
  return shared == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / shared;
}

inline double sq_euclid(const Row& x, const Row& y) {
  double sum = 0.0;
  int shared = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!x[r].has_value() || !y[r].has_value()) continue;
    sum += (*x[r] - *y[r]) * (*x[r] - *y[r]);
    shared += 1;
  }
  return shared == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / shared;
}

/// -1 closer to a, +1 closer to b, 0 in between (within tol).
inline int code(double z, double a, double b, double tol) {
  const double da = std::fabs(z - a), db = std::fabs(z - b);
  if (da < db - tol) return -1;
  if (da > db + tol) return 1;
  return 0;
}

inline double stolyhwo(const Row& x, const Row& y, const Row& a, const Row& b, double tol) {
  double sum = 0.0;
  int used = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!x[r] || !y[r] || !a[r] || !b[r]) continue;
    sum += std::abs(code(*x[r], *a[r], *b[r], tol) - code(*y[r], *a[r], *b[r], tol)) / 2.0;
    used += 1;
  }
  return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / used;
}

inline double path(const std::vector<double>& w, std::size_t n, const std::vector<std::size_t>& order) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) s += w[order[k] * n + order[k + 1]];
  return s;
}

struct Brute {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> argmin;  // canonical optimal orders, lexicographic
};

/// Every permutation with order[0] < order[n-1] (one per reversal pair).
inline Brute brute_force(const std::vector<double>& w, std::size_t n, double eps = 0.0) {
  Brute out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  do {
    if (n > 1 && order.front() > order.back()) continue;
    const double len = path(w, n, order);
    if (len < out.best - eps) {
      out.best = len;
      out.argmin.assign(1, order);
    } else if (std::fabs(len - out.best) <= eps) {
      out.argmin.push_back(order);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

/// Linear-interpolation sample quantile (type 7) of unsorted values.
inline double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const double lo = std::floor(h);
  const auto i = static_cast<std::size_t>(lo);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - lo) * (v[i + 1] - v[i]);
}

/// Random symmetric zero-diagonal weights. Integer-valued when `integer`, so
/// every path sum is exact in floating point.
inline std::vector<double> random_weights(std::size_t n, std::mt19937_64& gen, bool integer,
                                          double hi = 100.0) {
  std::vector<double> w(n * n, 0.0);
  std::uniform_real_distribution<double> real(0.0, hi);
  std::uniform_int_distribution<int> whole(0, static_cast<int>(hi));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      w[i * n + j] = w[j * n + i] = integer ? static_cast<double>(whole(gen)) : real(gen);
  return w;
}

inline std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("o" + std::to_string(i));
  return out;
}

inline czek::DistanceMatrix matrix(const std::vector<double>& w, std::size_t n) {
  return czek::DistanceMatrix(labels(n), w, "random");
}

}  // namespace oracle
