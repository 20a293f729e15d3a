#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czek/distance.hpp"

namespace czek {

/// Bijection on 0..n-1; order[k] is the observation placed at position k.
class Permutation {
 public:
  Permutation() = default;
  /// Throws DataError unless `order` is a permutation of 0..n-1.
  explicit Permutation(std::vector<std::size_t> order);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  std::size_t operator[](std::size_t k) const { return order_[k]; }

  Permutation reversed() const;
  /// The one of {this, reversed()} with order[0] <= order[n-1].
  Permutation canonical() const;
  bool is_canonical() const noexcept {
    return order_.empty() || order_.front() <= order_.back();
  }

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<std::size_t> order_;
};

enum class SeriationMethod { exact_dp, two_opt, anneal, identity };
std::string_view to_string(SeriationMethod method);

/// What the caller asks for; `automatic` picks exact up to the exact limit.
enum class MethodChoice { automatic, exact, two_opt, anneal };
std::optional<MethodChoice> method_choice_from_string(std::string_view s);
std::string_view to_string(MethodChoice choice);

struct SeriationResult {
  Permutation permutation;
  double objective = 0.0;  // path_length(permutation, matrix)
  SeriationMethod method = SeriationMethod::identity;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

/// Sum of distances between consecutive observations (open Hamiltonian path).
/// Throws DataError when sizes differ.
double path_length(const Permutation& p, const DistanceMatrix& m);

inline constexpr std::size_t kDefaultExactLimit = 20;

/// Held-Karp style DP over (visited subset, endpoint): O(2^n n^2) time and
/// 2^n n doubles of memory. Returns the lexicographically smallest optimal
/// order, which is reversal-canonical. Throws RuntimeError for n > max_n.
SeriationResult solve_exact(const DistanceMatrix& m, std::size_t max_n = kDefaultExactLimit);

/// Repeated best-improvement segment reversal until no reversal shortens the
/// path or max_passes is used up. Never worse than `start`.
SeriationResult solve_two_opt(const DistanceMatrix& m, const Permutation& start,
                              std::size_t max_passes = 1000);

/// Metropolis annealing with random segment reversals. The temperature is
/// relative: the absolute start temperature is initial_temperature times the
/// mean off-diagonal distance, multiplied by `cooling` after every proposal.
struct AnnealSchedule {
  double initial_temperature = 0.3;
  double cooling = 0.9995;
  std::size_t iterations = 20000;
};

/// Seeded random start, annealing, then a 2-opt polish of the best state
/// seen. Throws UsageError for an invalid schedule.
SeriationResult solve_anneal(const DistanceMatrix& m, std::uint64_t seed,
                             const AnnealSchedule& schedule = {});

struct SeriateOptions {
  std::size_t exact_limit = kDefaultExactLimit;
  AnnealSchedule schedule{};
  std::size_t two_opt_passes = 1000;
};

/// Dispatches to a solver and canonicalizes. `two_opt` starts from the input
/// order; `anneal` uses `seed`.
SeriationResult seriate(const DistanceMatrix& m, MethodChoice method, std::uint64_t seed = 0,
                        const SeriateOptions& options = {});

/// {"labels": [...], "order": [...], "objective": x, "method": "...",
///  "seed": s, "iterations": k}
nlohmann::json result_to_json(const SeriationResult& result, const DistanceMatrix& m);

/// Reads a permutation document. "labels" wins over "order" when present, so
/// a permutation can be applied to any matrix holding the same labels.
Permutation permutation_from_json(const nlohmann::json& doc, const DistanceMatrix& m);
Permutation load_permutation(const std::string& path, const DistanceMatrix& m);

}  // namespace czek
