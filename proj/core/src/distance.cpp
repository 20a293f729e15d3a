#include "czek/distance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "czek/csv.hpp"

namespace czek {

namespace {

void check_dims(ObservationView x, ObservationView y) {
  if (x.size() != y.size())
    throw DataError(fmt::format("dimension mismatch: {} vs {}", x.size(), y.size()));
}

/// Mean of f(x_r - y_r) over commonly observed r.
template <class F>
double pairwise_mean(ObservationView x, ObservationView y, F&& f) {
  check_dims(x, y);
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!x[r] || !y[r]) continue;
    sum += f(*x[r] - *y[r]);
    ++shared;
  }
  if (shared == 0) throw DisjointSupportError("no commonly observed coordinate");
  return sum / static_cast<double>(shared);
}

std::size_t shared_count(ObservationView x, ObservationView y) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < x.size(); ++r)
    if (x[r] && y[r]) ++n;
  return n;
}

std::optional<std::vector<std::optional<double>>> reference_row(
    const ResolvedTable& table, const std::optional<std::string>& label, std::string_view role) {
  if (!label) return std::nullopt;
  const auto idx = table.find_label(*label);
  if (!idx)
    throw DataError(fmt::format("{} observation '{}' is not in the table", role, *label));
  const auto row = table.row(*idx);
  return std::vector<std::optional<double>>(row.begin(), row.end());
}

}  // namespace

double dd_distance(ObservationView x, ObservationView y, const DistanceContext&) {
  return pairwise_mean(x, y, [](double d) { return std::abs(d); });
}

double sq_euclidean(ObservationView x, ObservationView y, const DistanceContext&) {
  return pairwise_mean(x, y, [](double d) { return d * d; });
}

double euclidean_distance(ObservationView x, ObservationView y, const DistanceContext& ctx) {
  return std::sqrt(sq_euclidean(x, y, ctx));
}

int reference_code(double z, double a, double b, double tie_tolerance) {
  const double da = std::abs(z - a);
  const double db = std::abs(z - b);
  if (da < db - tie_tolerance) return -1;
  if (da > db + tie_tolerance) return 1;
  return 0;
}

double stolyhwo_distance(ObservationView x, ObservationView y, const DistanceContext& ctx) {
  if (!ctx.reference_a || !ctx.reference_b)
    throw DataError("the stolyhwo distance needs both reference observations");
  if (!(ctx.tie_tolerance >= 0.0)) throw UsageError("tie tolerance must be non-negative");
  check_dims(x, y);
  const auto& a = *ctx.reference_a;
  const auto& b = *ctx.reference_b;
  if (a.size() != x.size() || b.size() != x.size())
    throw DataError("reference observations do not match the table dimension");

  int sum = 0;
  std::size_t used = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (!x[r] || !y[r] || !a[r] || !b[r]) continue;
    const int cx = reference_code(*x[r], *a[r], *b[r], ctx.tie_tolerance);
    const int cy = reference_code(*y[r], *a[r], *b[r], ctx.tie_tolerance);
    sum += std::abs(cx - cy);
    ++used;
  }
  if (used == 0) throw DisjointSupportError("no coordinate observed in both observations and references");
  return static_cast<double>(sum) / (2.0 * static_cast<double>(used));
}

DistanceFunction dd_function() { return {"dd", &dd_distance, false}; }
DistanceFunction sq_euclidean_function() { return {"sq_euclidean", &sq_euclidean, false}; }
DistanceFunction stolyhwo_function() { return {"stolyhwo", &stolyhwo_distance, true}; }
DistanceFunction euclidean_function() { return {"euclidean", &euclidean_distance, false}; }

// ---------------------------------------------------------------------------
// Registry

DistanceRegistry DistanceRegistry::with_builtins() {
  DistanceRegistry r;
  r.register_distance(dd_function());
  r.register_distance(sq_euclidean_function());
  r.register_distance(stolyhwo_function());
  return r;
}

DistanceRegistry::Handle DistanceRegistry::register_distance(DistanceFunction f) {
  if (f.name.empty()) throw UsageError("distance name must not be empty");
  if (!f.eval) throw UsageError(fmt::format("distance '{}' has no evaluation function", f.name));
  if (contains(f.name)) throw UsageError(fmt::format("distance '{}' is already registered", f.name));
  functions_.push_back(std::move(f));
  return functions_.size() - 1;
}

bool DistanceRegistry::contains(std::string_view name) const {
  return std::any_of(functions_.begin(), functions_.end(),
                     [&](const DistanceFunction& f) { return f.name == name; });
}

const DistanceFunction& DistanceRegistry::get(std::string_view name) const {
  for (const auto& f : functions_)
    if (f.name == name) return f;
  throw UsageError(fmt::format("unknown distance '{}' (known: {})", name,
                               fmt::join(names(), ", ")));
}

const DistanceFunction& DistanceRegistry::get(Handle handle) const {
  if (handle >= functions_.size()) throw UsageError("invalid distance handle");
  return functions_[handle];
}

std::vector<std::string> DistanceRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& f : functions_) out.push_back(f.name);
  return out;
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> values,
                               std::string distance_name, std::vector<std::size_t> coverage)
    : labels_(std::move(labels)),
      values_(std::move(values)),
      distance_name_(std::move(distance_name)),
      coverage_(std::move(coverage)) {
  const std::size_t n = labels_.size();
  if (values_.size() != n * n)
    throw DataError(fmt::format("matrix has {} values, expected {}x{}", values_.size(), n, n));
  if (!coverage_.empty() && coverage_.size() != n * n)
    throw DataError("coverage counts do not match the matrix size");
  std::set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw DataError(fmt::format("duplicate matrix label '{}'", l));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values_[i * n + j];
      if (!std::isfinite(v) || v < 0.0)
        throw DataError(fmt::format("matrix entry ({}, {}) = {} is not finite and non-negative",
                                    labels_[i], labels_[j], v));
      if (i == j && v != 0.0)
        throw DataError(fmt::format("diagonal entry for '{}' is {}, expected 0", labels_[i], v));
      if (j > i && v != values_[j * n + i])
        throw DataError(fmt::format("matrix is not symmetric at ({}, {}): {} vs {}", labels_[i],
                                    labels_[j], v, values_[j * n + i]));
    }
  }
}

std::optional<std::size_t> DistanceMatrix::find_label(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

DistanceMatrix DistanceMatrix::permuted(std::span<const std::size_t> order) const {
  const std::size_t n = size();
  if (order.size() != n) throw DataError("permutation size does not match the matrix");
  std::vector<std::string> labels;
  std::vector<double> values(n * n);
  std::vector<std::size_t> cov(coverage_.empty() ? 0 : n * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (order[a] >= n) throw DataError("permutation index out of range");
    labels.push_back(labels_[order[a]]);
    for (std::size_t b = 0; b < n; ++b) {
      values[a * n + b] = (*this)(order[a], order[b]);
      if (!cov.empty()) cov[a * n + b] = coverage(order[a], order[b]);
    }
  }
  return DistanceMatrix(std::move(labels), std::move(values), distance_name_, std::move(cov));
}

// ---------------------------------------------------------------------------
// Computation

DistanceContext make_context(const ResolvedTable& table, const std::optional<std::string>& reference_a,
                             const std::optional<std::string>& reference_b, double tie_tolerance) {
  DistanceContext ctx;
  ctx.reference_a = reference_row(table, reference_a ? reference_a : table.annotations().reference_a,
                                  "reference_a");
  ctx.reference_b = reference_row(table, reference_b ? reference_b : table.annotations().reference_b,
                                  "reference_b");
  ctx.tie_tolerance = tie_tolerance;
  return ctx;
}

DistanceMatrix compute_matrix(const ResolvedTable& table, const DistanceFunction& f,
                              const DistanceContext& ctx) {
  const std::size_t n = table.rows();
  if (n < 2) throw DataError("a distance matrix needs at least two observations");
  if (f.requires_normalization_off && table.provenance().normalized)
    throw DataError(fmt::format("distance '{}' must not be used on normalized variables", f.name));

  std::vector<double> values(n * n, 0.0);
  std::vector<std::size_t> coverage(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    coverage[i * n + i] = shared_count(table.row(i), table.row(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      try {
        d = f.eval(table.row(i), table.row(j), ctx);
      } catch (const DisjointSupportError& e) {
        throw DisjointSupportError(fmt::format("{}: observations '{}' and '{}': {}", f.name,
                                               table.labels()[i], table.labels()[j], e.what()));
      }
      if (!std::isfinite(d) || d < 0.0)
        throw DataError(fmt::format("{}: distance between '{}' and '{}' is {}", f.name,
                                    table.labels()[i], table.labels()[j], d));
      values[i * n + j] = values[j * n + i] = d;
      coverage[i * n + j] = coverage[j * n + i] = shared_count(table.row(i), table.row(j));
    }
  }
  return DistanceMatrix(table.labels(), std::move(values), f.name, std::move(coverage));
}

// ---------------------------------------------------------------------------
// CSV

DistanceMatrix read_matrix_csv(std::istream& in, const std::string& source_name) {
  const auto records = csv::read(in, source_name);
  if (records.empty()) throw ParseError(source_name, 1, 0, "empty matrix file");
  const auto& header = records.front();
  const std::size_t n = header.fields.size() - 1;
  if (n == 0) throw ParseError(source_name, header.line, 0, "matrix header has no labels");
  if (records.size() != n + 1)
    throw ParseError(source_name, records.back().line, 0,
                     fmt::format("expected {} matrix rows, found {}", n, records.size() - 1));

  std::vector<std::string> labels(header.fields.begin() + 1, header.fields.end());
  std::vector<std::optional<double>> cells(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i + 1];
    if (rec.fields.size() != n + 1)
      throw ParseError(source_name, rec.line, 0, "ragged matrix row");
    if (rec.fields[0] != labels[i])
      throw ParseError(source_name, rec.line, 1,
                       fmt::format("row label '{}' does not match column label '{}'",
                                   rec.fields[0], labels[i]));
    for (std::size_t j = 0; j < n; ++j) {
      Cell c;
      try {
        c = parse_cell(rec.fields[j + 1]);
      } catch (const DataError& e) {
        throw ParseError(source_name, rec.line, j + 2, e.what());
      }
      if (is_interval(c)) throw ParseError(source_name, rec.line, j + 2, "interval in a matrix");
      if (const auto* v = std::get_if<double>(&c)) cells[i * n + j] = *v;
    }
  }
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = cells[i * n + j];
      const auto& mirror = cells[j * n + i];
      if (v)
        values[i * n + j] = *v;
      else if (mirror)
        values[i * n + j] = *mirror;
      else if (i == j)
        values[i * n + j] = 0.0;
      else
        throw ParseError(source_name, records[i + 1].line, j + 2,
                         "missing matrix entry and its mirror");
    }
  }
  std::string name = header.fields.front();
  if (name == "label") name.clear();
  return DistanceMatrix(std::move(labels), std::move(values), std::move(name));
}

DistanceMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open matrix '" + path + "'");
  return read_matrix_csv(in, path);
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& m) {
  std::vector<std::string> fields{m.distance_name().empty() ? "label" : m.distance_name()};
  fields.insert(fields.end(), m.labels().begin(), m.labels().end());
  csv::write_record(out, fields);
  for (std::size_t i = 0; i < m.size(); ++i) {
    fields.assign(1, m.labels()[i]);
    for (std::size_t j = 0; j < m.size(); ++j) fields.push_back(fmt::format("{}", m(i, j)));
    csv::write_record(out, fields);
  }
}

}  // namespace czek
