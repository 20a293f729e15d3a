#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "czek/dataset.hpp"
#include "czek/error.hpp"

namespace czek {

using ObservationView = std::span<const std::optional<double>>;

/// Extra inputs some distance functions need. The reference vectors are the
/// two clade representatives used by the reference-pair coding distance.
struct DistanceContext {
  std::optional<std::vector<std::optional<double>>> reference_a;
  std::optional<std::vector<std::optional<double>>> reference_b;
  double tie_tolerance = 0.0;
};

/// A named, pure, symmetric distance. `eval` must return a finite value >= 0
/// and may throw DisjointSupportError / DataError.
struct DistanceFunction {
  std::string name;
  std::function<double(ObservationView, ObservationView, const DistanceContext&)> eval;
  bool requires_normalization_off = false;
};

/// Two observations without a commonly observed (usable) coordinate.
class DisjointSupportError : public DataError {
 public:
  explicit DisjointSupportError(const std::string& what) : DataError(what) {}
};

// All built-ins average over the d' coordinates observed in both vectors
// (pairwise-complete), so d' = d reproduces the textbook formula exactly.

/// Mean absolute difference.
double dd_distance(ObservationView x, ObservationView y, const DistanceContext& ctx = {});

/// Mean squared difference.
double sq_euclidean(ObservationView x, ObservationView y, const DistanceContext& ctx = {});

/// Root of the mean squared difference. Not a registry built-in; shipped as a
/// ready-made custom distance for the experiment grid.
double euclidean_distance(ObservationView x, ObservationView y,
                          const DistanceContext& ctx = {});

/// -1 when z is closer to a, +1 when closer to b, 0 within tie_tolerance.
int reference_code(double z, double a, double b, double tie_tolerance);

/// Reference-pair coding distance in [0, 1]. Each coordinate usable in x, y
/// and both references is coded with reference_code; the distance is the mean
/// of |code(x) - code(y)| / 2. This reconstructs the reference-pair counting
/// distance from its prose description; the original listing is not public
/// here. Throws DataError when either reference is absent.
double stolyhwo_distance(ObservationView x, ObservationView y, const DistanceContext& ctx);

DistanceFunction dd_function();
DistanceFunction sq_euclidean_function();
DistanceFunction stolyhwo_function();
DistanceFunction euclidean_function();

/// Name -> distance lookup shared by the CLI and the experiment runner.
class DistanceRegistry {
 public:
  using Handle = std::size_t;

  DistanceRegistry() = default;

  /// dd, sq_euclidean, stolyhwo.
  static DistanceRegistry with_builtins();

  /// Throws UsageError on an empty or duplicate name or a missing eval.
  Handle register_distance(DistanceFunction f);

  bool contains(std::string_view name) const;
  const DistanceFunction& get(std::string_view name) const;  // UsageError if unknown
  const DistanceFunction& get(Handle handle) const;
  std::vector<std::string> names() const;  // registration order

 private:
  std::vector<DistanceFunction> functions_;
};

/// Symmetric, zero-diagonal, finite, non-negative matrix with labels.
class DistanceMatrix {
 public:
  /// Validates all invariants; throws DataError naming the offending cell.
  /// `coverage` is either empty or n*n shared-dimension counts.
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> values,
                 std::string distance_name = {}, std::vector<std::size_t> coverage = {});

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& distance_name() const noexcept { return distance_name_; }
  bool has_coverage() const noexcept { return !coverage_.empty(); }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  std::size_t coverage(std::size_t i, std::size_t j) const { return coverage_[i * size() + j]; }

  std::optional<std::size_t> find_label(std::string_view label) const;

  /// Rows/columns reordered so that new index k is old index order[k].
  DistanceMatrix permuted(std::span<const std::size_t> order) const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
  std::string distance_name_;
  std::vector<std::size_t> coverage_;
};

/// Builds the context for `f` from observations named in the table
/// annotations (reference_a / reference_b) unless overridden.
DistanceContext make_context(const ResolvedTable& table,
                             const std::optional<std::string>& reference_a = std::nullopt,
                             const std::optional<std::string>& reference_b = std::nullopt,
                             double tie_tolerance = 0.0);

/// Evaluates each of the n(n-1)/2 pairs once. Throws DataError when f needs
/// unnormalized data and the table is normalized, or when n < 2; a pair with
/// no shared coordinates throws DisjointSupportError naming both labels.
DistanceMatrix compute_matrix(const ResolvedTable& table, const DistanceFunction& f,
                              const DistanceContext& ctx = {});

/// Square CSV: header "<name>,<l1>,...,<ln>", then one row per label. The
/// corner cell holds the distance name ("label" when unnamed). Empty
/// cells are filled from the mirrored cell (so a triangular matrix is
/// accepted) and an empty diagonal reads as 0.
DistanceMatrix read_matrix_csv(std::istream& in, const std::string& source_name);
DistanceMatrix load_matrix(const std::string& path);
void write_matrix_csv(std::ostream& out, const DistanceMatrix& m);

}  // namespace czek
