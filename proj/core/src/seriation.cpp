#include "czek/seriation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "czek/random.hpp"

namespace czek {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Scale for "equal objective" comparisons: largest matrix entry (>= 1).
double tie_epsilon(const DistanceMatrix& m) {
  double hi = 1.0;
  for (double v : m.values()) hi = std::max(hi, v);
  return 1e-12 * hi * static_cast<double>(std::max<std::size_t>(m.size(), 1));
}

/// Change in path length when order[i..j] is reversed (i < j).
double reversal_delta(const DistanceMatrix& m, const std::vector<std::size_t>& p, std::size_t i,
                      std::size_t j) {
  const std::size_t n = p.size();
  double before = 0.0;
  double after = 0.0;
  if (i > 0) {
    before += m(p[i - 1], p[i]);
    after += m(p[i - 1], p[j]);
  }
  if (j + 1 < n) {
    before += m(p[j], p[j + 1]);
    after += m(p[i], p[j + 1]);
  }
  return after - before;
}

SeriationResult finish(const DistanceMatrix& m, Permutation p, SeriationMethod method,
                       std::uint64_t seed, std::size_t iterations) {
  SeriationResult r;
  r.permutation = p.canonical();
  r.objective = path_length(r.permutation, m);
  r.method = method;
  r.seed = seed;
  r.iterations = iterations;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (std::size_t v : order_) {
    if (v >= order_.size() || seen[v])
      throw DataError(fmt::format("not a permutation of 0..{}", order_.size() - 1));
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return Permutation(std::move(order));
}

Permutation Permutation::reversed() const {
  Permutation p;
  p.order_.assign(order_.rbegin(), order_.rend());
  return p;
}

Permutation Permutation::canonical() const { return is_canonical() ? *this : reversed(); }

std::string_view to_string(SeriationMethod method) {
  switch (method) {
    case SeriationMethod::exact_dp: return "exact_dp";
    case SeriationMethod::two_opt: return "two_opt";
    case SeriationMethod::anneal: return "anneal";
    case SeriationMethod::identity: return "identity";
  }
  return "identity";
}

std::optional<MethodChoice> method_choice_from_string(std::string_view s) {
  if (s == "auto") return MethodChoice::automatic;
  if (s == "exact") return MethodChoice::exact;
  if (s == "2opt" || s == "two_opt") return MethodChoice::two_opt;
  if (s == "anneal") return MethodChoice::anneal;
  return std::nullopt;
}

std::string_view to_string(MethodChoice choice) {
  switch (choice) {
    case MethodChoice::automatic: return "auto";
    case MethodChoice::exact: return "exact";
    case MethodChoice::two_opt: return "2opt";
    case MethodChoice::anneal: return "anneal";
  }
  return "auto";
}

// ---------------------------------------------------------------------------
// Objective and solvers

double path_length(const Permutation& p, const DistanceMatrix& m) {
  if (p.size() != m.size())
    throw DataError(fmt::format("permutation of size {} does not match a {}x{} matrix", p.size(),
                                m.size(), m.size()));
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) total += m(p[k], p[k + 1]);
  return total;
}

SeriationResult solve_exact(const DistanceMatrix& m, std::size_t max_n) {
  const std::size_t n = m.size();
  if (n > max_n)
    throw RuntimeError(fmt::format("exact seriation limited to n <= {} (got n = {})", max_n, n));
  if (n > 30) throw RuntimeError("exact seriation cannot index more than 30 observations");
  if (n <= 1) return finish(m, Permutation::identity(n), SeriationMethod::exact_dp, 0, 0);

  const std::size_t subsets = std::size_t{1} << n;
  const std::size_t full = subsets - 1;
  // best[S * n + v]: shortest path visiting exactly S and ending at v.
  std::vector<double> best(subsets * n, kInf);
  for (std::size_t v = 0; v < n; ++v) best[(std::size_t{1} << v) * n + v] = 0.0;

  for (std::size_t s = 1; s < subsets; ++s) {
    for (std::size_t v = 0; v < n; ++v) {
      const double here = best[s * n + v];
      if (here == kInf) continue;
      for (std::size_t u = 0; u < n; ++u) {
        if (s & (std::size_t{1} << u)) continue;
        const std::size_t t = s | (std::size_t{1} << u);
        const double cand = here + m(v, u);
        if (cand < best[t * n + u]) best[t * n + u] = cand;
      }
    }
  }

  double opt = kInf;
  for (std::size_t v = 0; v < n; ++v) opt = std::min(opt, best[full * n + v]);
  const double eps = tie_epsilon(m);

  // A path ending at v read backwards starts at v, so best[S][v] is also the
  // cheapest way to cover S starting from v. Walk forward choosing the
  // smallest admissible index each time: lexicographically smallest optimum.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::size_t v = 0;
  while (best[full * n + v] > opt + eps) ++v;
  order.push_back(v);
  std::size_t remaining = full;
  while (order.size() < n) {
    const std::size_t rest = remaining & ~(std::size_t{1} << v);
    const double target = best[remaining * n + v];
    std::size_t next = n;
    for (std::size_t u = 0; u < n; ++u) {
      if (!(rest & (std::size_t{1} << u))) continue;
      if (best[rest * n + u] + m(v, u) <= target + eps) {
        next = u;
        break;
      }
    }
    if (next == n) throw RuntimeError("exact seriation reconstruction failed");
    order.push_back(next);
    remaining = rest;
    v = next;
  }
  return finish(m, Permutation(std::move(order)), SeriationMethod::exact_dp, 0, subsets);
}

SeriationResult solve_two_opt(const DistanceMatrix& m, const Permutation& start,
                              std::size_t max_passes) {
  const std::size_t n = m.size();
  if (start.size() != n) throw DataError("start permutation does not match the matrix");
  std::vector<std::size_t> p = start.order();
  const double eps = tie_epsilon(m);
  std::size_t moves = 0;

  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    double best_delta = -eps;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = reversal_delta(m, p, i, j);
        if (d < best_delta) {
          best_delta = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (bj == 0) break;
    std::reverse(p.begin() + static_cast<std::ptrdiff_t>(bi),
                 p.begin() + static_cast<std::ptrdiff_t>(bj) + 1);
    ++moves;
  }

  Permutation result(std::move(p));
  if (path_length(result, m) > path_length(start, m)) result = start;
  return finish(m, std::move(result), SeriationMethod::two_opt, 0, moves);
}

SeriationResult solve_anneal(const DistanceMatrix& m, std::uint64_t seed,
                             const AnnealSchedule& schedule) {
  if (!(schedule.initial_temperature > 0.0) || !std::isfinite(schedule.initial_temperature))
    throw UsageError("annealing needs a positive finite initial temperature");
  if (!(schedule.cooling > 0.0 && schedule.cooling < 1.0))
    throw UsageError("annealing cooling factor must lie in (0, 1)");

  const std::size_t n = m.size();
  Rng rng(seed);
  std::vector<std::size_t> p = random_order(n, rng);

  double mean_edge = 0.0;
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) mean_edge += m(i, j);
    mean_edge /= static_cast<double>(n * (n - 1) / 2);
  }

  std::vector<std::size_t> best = p;
  if (n >= 3 && mean_edge > 0.0) {
    const double eps = tie_epsilon(m);
    double temperature = schedule.initial_temperature * mean_edge;
    double current = path_length(Permutation(p), m);
    double best_cost = current;
    Permutation best_canonical = Permutation(best).canonical();

    for (std::size_t it = 0; it < schedule.iterations; ++it, temperature *= schedule.cooling) {
      std::size_t i = rng.below(n);
      std::size_t j = rng.below(n);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (i == 0 && j == n - 1) continue;
      const double delta = reversal_delta(m, p, i, j);
      if (delta > 0.0 && rng.unit() >= std::exp(-delta / temperature)) continue;
      std::reverse(p.begin() + static_cast<std::ptrdiff_t>(i),
                   p.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      current += delta;
      if (current < best_cost - eps) {
        best = p;
        best_cost = current;
        best_canonical = Permutation(best).canonical();
      } else if (current <= best_cost + eps) {
        Permutation cand = Permutation(p).canonical();
        if (cand < best_canonical) {
          best = p;
          best_canonical = std::move(cand);
        }
      }
    }
  }

  SeriationResult polished = solve_two_opt(m, Permutation(std::move(best)));
  polished.method = SeriationMethod::anneal;
  polished.seed = seed;
  polished.iterations = schedule.iterations;
  return polished;
}

SeriationResult seriate(const DistanceMatrix& m, MethodChoice method, std::uint64_t seed,
                        const SeriateOptions& options) {
  if (method == MethodChoice::automatic)
    method = m.size() <= options.exact_limit ? MethodChoice::exact : MethodChoice::anneal;
  switch (method) {
    case MethodChoice::exact: return solve_exact(m, options.exact_limit);
    case MethodChoice::two_opt:
      return solve_two_opt(m, Permutation::identity(m.size()), options.two_opt_passes);
    case MethodChoice::anneal: return solve_anneal(m, seed, options.schedule);
    case MethodChoice::automatic: break;
  }
  throw UsageError("unknown seriation method");
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json result_to_json(const SeriationResult& result, const DistanceMatrix& m) {
  nlohmann::json labels = nlohmann::json::array();
  for (std::size_t k : result.permutation.order()) labels.push_back(m.labels()[k]);
  return nlohmann::json{
      {"labels", labels},
      {"order", result.permutation.order()},
      {"objective", result.objective},
      {"method", std::string(to_string(result.method))},
      {"seed", result.seed},
      {"iterations", result.iterations},
  };
}

Permutation permutation_from_json(const nlohmann::json& doc, const DistanceMatrix& m) {
  std::vector<std::size_t> order;
  try {
    if (doc.contains("labels")) {
      for (const auto& l : doc.at("labels")) {
        const auto idx = m.find_label(l.get<std::string>());
        if (!idx)
          throw DataError(fmt::format("permutation label '{}' is not in the matrix",
                                      l.get<std::string>()));
        order.push_back(*idx);
      }
    } else if (doc.contains("order")) {
      order = doc.at("order").get<std::vector<std::size_t>>();
    } else {
      throw DataError("permutation document needs \"labels\" or \"order\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed permutation document: ") + e.what());
  }
  if (order.size() != m.size())
    throw DataError(fmt::format("permutation has {} entries, matrix has {}", order.size(), m.size()));
  return Permutation(std::move(order));
}

Permutation load_permutation(const std::string& path, const DistanceMatrix& m) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open permutation '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
  return permutation_from_json(doc, m);
}

}  // namespace czek
