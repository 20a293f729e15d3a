#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace czek {

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

struct Missing {
  bool operator==(const Missing&) const = default;
};

/// Closed range [lo, hi], lo <= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

using Cell = std::variant<Missing, double, Interval>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }
inline bool is_interval(const Cell& c) { return std::holds_alternative<Interval>(c); }

/// Throws DataError when lo > hi or either bound is not finite.
Cell make_interval(double lo, double hi);

/// Cell syntax: empty -> Missing; decimal number -> scalar; "lo-hi" or
/// "lo–hi" (en dash) -> Interval. A dash only separates when it follows a
/// digit, '.' or whitespace, so "-3" is a scalar and "-5--3" is [-5, -3].
/// Throws DataError describing the problem (no coordinates).
Cell parse_cell(std::string_view text);

/// Inverse of parse_cell; numbers use the shortest round-trip form.
std::string format_cell(const Cell& cell);

// ---------------------------------------------------------------------------
// Variables and tables
// ---------------------------------------------------------------------------

enum class VariableKind {
  plain,
  angle_degrees,
  angle_radians,  // an angle column after conversion
  ratio,
};

std::string_view to_string(VariableKind kind);
std::optional<VariableKind> variable_kind_from_string(std::string_view s);

struct VariableMeta {
  std::string name;
  VariableKind kind = VariableKind::plain;
  std::vector<std::string> components;  // nonempty iff kind == ratio

  bool operator==(const VariableMeta&) const = default;
};

/// Reserved variable-set name meaning "every variable".
inline constexpr std::string_view kFullVariableSet = "full";

/// Everything the metadata sidecar contributes besides variable kinds.
struct TableAnnotations {
  std::map<std::string, std::string> groups;  // label -> group name
  std::optional<std::string> focal;
  std::optional<std::string> reference_a;
  std::optional<std::string> reference_b;
  std::map<std::string, std::vector<std::string>> variable_sets;

  bool operator==(const TableAnnotations&) const = default;
};

/// Immutable observations x variables grid of cells. Constructor validates
/// shape and label uniqueness; transformations return new tables.
class ObservationTable {
 public:
  ObservationTable(std::vector<std::string> labels,
                   std::vector<VariableMeta> variables, std::vector<Cell> cells,
                   TableAnnotations annotations = {});

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return variables_.size(); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<VariableMeta>& variables() const noexcept { return variables_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const TableAnnotations& annotations() const noexcept { return annotations_; }

  const Cell& at(std::size_t row, std::size_t col) const {
    return cells_[row * variables_.size() + col];
  }

  std::optional<std::size_t> find_label(std::string_view label) const;
  std::optional<std::size_t> find_variable(std::string_view name) const;

  bool operator==(const ObservationTable&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<VariableMeta> variables_;
  std::vector<Cell> cells_;
  TableAnnotations annotations_;
};

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

/// Reads the CSV table: header row of variable names (first header cell is
/// the label column and is ignored), one observation per row. All variables
/// come back as VariableKind::plain. Errors carry line/column coordinates.
ObservationTable parse_table(std::istream& in, const std::string& source_name);

void write_table(std::ostream& out, const ObservationTable& table);

/// Contents of a metadata sidecar (see docs/formats.md).
struct TableMetadata {
  std::map<std::string, VariableKind> kinds;
  std::map<std::string, std::vector<std::string>> ratio_components;
  TableAnnotations annotations;
};

TableMetadata parse_metadata(std::istream& in, const std::string& source_name);

/// Checks the metadata against the table (every name must exist, ratio kinds
/// and component lists must agree) and returns the annotated table.
ObservationTable apply_metadata(const ObservationTable& table,
                                const TableMetadata& meta);

/// parse_table + optional parse_metadata/apply_metadata from files.
ObservationTable load_table(const std::string& csv_path,
                            const std::optional<std::string>& meta_path = std::nullopt);

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

/// Interval(lo, hi) -> (lo + hi) / 2.
ObservationTable resolve_intervals(const ObservationTable& table);

/// Multiplies angle_degrees columns by pi/180 and marks them angle_radians.
ObservationTable angles_to_radians(const ObservationTable& table);

enum class VariableMode { all, drop_ratios, drop_ratio_components };

std::string_view to_string(VariableMode mode);
std::optional<VariableMode> variable_mode_from_string(std::string_view s);

/// Applies the mode, then intersects with `keep` (keeps table column order).
/// Throws UsageError when `keep` names an unknown variable.
ObservationTable subset_variables(const ObservationTable& table, VariableMode mode,
                                  const std::optional<std::vector<std::string>>& keep =
                                      std::nullopt);

/// Exact missing/total count for one observation (or for a whole table).
struct Missingness {
  std::string label;
  std::size_t missing = 0;
  std::size_t total = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(total);
  }
  bool operator==(const Missingness&) const = default;
};

/// Per observation, in table order. Throws DataError for a zero-column table.
std::vector<Missingness> missingness(const ObservationTable& table);
Missingness overall_missingness(const ObservationTable& table);

/// Drops observations whose missing fraction is strictly above `threshold`.
ObservationTable filter_by_missingness(const ObservationTable& table, double threshold);

// ---------------------------------------------------------------------------
// Resolved tables
// ---------------------------------------------------------------------------

enum class ColumnScaling {
  untouched,     // not normalized
  standardized,  // (x - mean) / sd
  centred_constant,      // sd == 0: centred only
  centred_insufficient,  // fewer than two observed values: centred only
};

struct Provenance {
  bool intervals_resolved = false;
  bool radians = false;
  bool normalized = false;
  std::vector<ColumnScaling> columns;

  bool operator==(const Provenance&) const = default;
};

/// Table with only missing or scalar cells; the input to distance functions.
class ResolvedTable {
 public:
  ResolvedTable(std::vector<std::string> labels, std::vector<VariableMeta> variables,
                std::vector<std::optional<double>> values, TableAnnotations annotations,
                Provenance provenance);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return variables_.size(); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<VariableMeta>& variables() const noexcept { return variables_; }
  const std::vector<std::optional<double>>& values() const noexcept { return values_; }
  const TableAnnotations& annotations() const noexcept { return annotations_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  const std::optional<double>& at(std::size_t row, std::size_t col) const {
    return values_[row * variables_.size() + col];
  }
  std::span<const std::optional<double>> row(std::size_t r) const {
    return {values_.data() + r * variables_.size(), variables_.size()};
  }

  std::optional<std::size_t> find_label(std::string_view label) const;

  bool operator==(const ResolvedTable&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<VariableMeta> variables_;
  std::vector<std::optional<double>> values_;
  TableAnnotations annotations_;
  Provenance provenance_;
};

/// Throws DataError if any Interval cell remains.
ResolvedTable to_resolved(const ObservationTable& table);

/// Column-wise (x - mean) / sd over observed entries, sample sd (n - 1).
/// Constant columns and columns with < 2 observed values are centred only.
/// Throws DataError if any Interval cell remains.
ResolvedTable normalize(const ObservationTable& table);

std::vector<Missingness> missingness(const ResolvedTable& table);

}  // namespace czek
