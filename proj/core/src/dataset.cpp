#include "czek/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "czek/csv.hpp"
#include "czek/error.hpp"

namespace czek {

namespace {

constexpr std::string_view kEnDash = "\xE2\x80\x93";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool separator_context(char prev) {
  return (prev >= '0' && prev <= '9') || prev == '.' || prev == ' ' || prev == '\t';
}

std::string format_number(double v) { return fmt::format("{}", v); }

ObservationTable select_columns(const ObservationTable& t, const std::vector<bool>& keep) {
  std::vector<VariableMeta> vars;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    if (keep[c]) {
      vars.push_back(t.variables()[c]);
      cols.push_back(c);
    }
  }
  std::vector<Cell> cells;
  cells.reserve(t.rows() * cols.size());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c : cols) cells.push_back(t.at(r, c));
  return ObservationTable(t.labels(), std::move(vars), std::move(cells), t.annotations());
}

template <class F>
ObservationTable map_cells(const ObservationTable& t, std::vector<VariableMeta> vars, F&& f) {
  std::vector<Cell> cells;
  cells.reserve(t.cells().size());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) cells.push_back(f(t.at(r, c), c));
  return ObservationTable(t.labels(), std::move(vars), std::move(cells), t.annotations());
}

std::optional<std::size_t> index_of(const std::vector<std::string>& v, std::string_view s) {
  const auto it = std::find(v.begin(), v.end(), s);
  if (it == v.end()) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

std::vector<std::optional<double>> scalar_values(const ObservationTable& t) {
  std::vector<std::optional<double>> values;
  values.reserve(t.cells().size());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const Cell& cell = t.at(r, c);
      if (const auto* v = std::get_if<double>(&cell)) {
        values.emplace_back(*v);
      } else if (is_missing(cell)) {
        values.emplace_back(std::nullopt);
      } else {
        throw DataError(fmt::format("interval cell at observation '{}', variable '{}' must be "
                                    "resolved first",
                                    t.labels()[r], t.variables()[c].name));
      }
    }
  }
  return values;
}

bool any_radians(const std::vector<VariableMeta>& vars) {
  return std::any_of(vars.begin(), vars.end(),
                     [](const VariableMeta& v) { return v.kind == VariableKind::angle_radians; });
}

std::vector<Missingness> count_missing(const std::vector<std::string>& labels, std::size_t cols,
                                       auto&& is_missing_at) {
  if (cols == 0) throw DataError("missingness needs at least one variable");
  std::vector<Missingness> out;
  out.reserve(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    Missingness m{labels[r], 0, cols};
    for (std::size_t c = 0; c < cols; ++c)
      if (is_missing_at(r, c)) ++m.missing;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cells

Cell make_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DataError("interval bounds must be finite");
  if (lo > hi)
    throw DataError(fmt::format("interval lower bound {} exceeds upper bound {}", lo, hi));
  return Interval{lo, hi};
}

Cell parse_cell(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) return Missing{};
  if (auto v = parse_number(s)) return *v;

  for (std::size_t i = 1; i < s.size(); ++i) {
    std::size_t width = 0;
    if (s[i] == '-')
      width = 1;
    else if (s.substr(i).starts_with(kEnDash))
      width = kEnDash.size();
    if (width == 0 || !separator_context(s[i - 1])) continue;
    const auto lo = parse_number(s.substr(0, i));
    const auto hi = parse_number(s.substr(i + width));
    if (lo && hi) return make_interval(*lo, *hi);
  }
  throw DataError(fmt::format("malformed cell '{}': expected a number or 'lo-hi' interval", s));
}

std::string format_cell(const Cell& cell) {
  if (const auto* v = std::get_if<double>(&cell)) return format_number(*v);
  if (const auto* iv = std::get_if<Interval>(&cell))
    return format_number(iv->lo) + "-" + format_number(iv->hi);
  return {};
}

// ---------------------------------------------------------------------------
// Variables

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::plain: return "plain";
    case VariableKind::angle_degrees: return "angle_degrees";
    case VariableKind::angle_radians: return "angle_radians";
    case VariableKind::ratio: return "ratio";
  }
  return "plain";
}

std::optional<VariableKind> variable_kind_from_string(std::string_view s) {
  for (auto k : {VariableKind::plain, VariableKind::angle_degrees, VariableKind::angle_radians,
                 VariableKind::ratio})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(VariableMode mode) {
  switch (mode) {
    case VariableMode::all: return "all";
    case VariableMode::drop_ratios: return "drop_ratios";
    case VariableMode::drop_ratio_components: return "drop_ratio_components";
  }
  return "all";
}

std::optional<VariableMode> variable_mode_from_string(std::string_view s) {
  for (auto m : {VariableMode::all, VariableMode::drop_ratios, VariableMode::drop_ratio_components})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ObservationTable

ObservationTable::ObservationTable(std::vector<std::string> labels,
                                   std::vector<VariableMeta> variables, std::vector<Cell> cells,
                                   TableAnnotations annotations)
    : labels_(std::move(labels)),
      variables_(std::move(variables)),
      cells_(std::move(cells)),
      annotations_(std::move(annotations)) {
  if (cells_.size() != labels_.size() * variables_.size())
    throw DataError(fmt::format("cell count {} does not match {} observations x {} variables",
                                cells_.size(), labels_.size(), variables_.size()));
  std::set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw DataError(fmt::format("duplicate observation label '{}'", l));
  seen.clear();
  for (const auto& v : variables_) {
    if (!seen.insert(v.name).second)
      throw DataError(fmt::format("duplicate variable name '{}'", v.name));
    if ((v.kind == VariableKind::ratio) != !v.components.empty())
      throw DataError(fmt::format("variable '{}': components must be given exactly for ratios",
                                  v.name));
  }
  for (const auto& c : cells_)
    if (const auto* iv = std::get_if<Interval>(&c); iv && iv->lo > iv->hi)
      throw DataError("interval with lower bound above upper bound");
}

std::optional<std::size_t> ObservationTable::find_label(std::string_view label) const {
  return index_of(labels_, label);
}

std::optional<std::size_t> ObservationTable::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// I/O

ObservationTable parse_table(std::istream& in, const std::string& source_name) {
  const auto records = csv::read(in, source_name);
  if (records.empty()) throw ParseError(source_name, 1, 0, "empty table: no header row");

  const auto& header = records.front();
  if (header.fields.size() < 2)
    throw ParseError(source_name, header.line, 0, "header has no variable columns");

  std::vector<VariableMeta> variables;
  std::set<std::string> names;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    std::string name(trim(header.fields[c]));
    if (name.empty()) throw ParseError(source_name, header.line, c + 1, "empty variable name");
    if (!names.insert(name).second)
      throw ParseError(source_name, header.line, c + 1,
                       fmt::format("duplicate variable name '{}'", name));
    variables.push_back(VariableMeta{std::move(name), VariableKind::plain, {}});
  }

  std::vector<std::string> labels;
  std::vector<Cell> cells;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size())
      throw ParseError(source_name, rec.line, 0,
                       fmt::format("ragged row: {} fields, header has {}", rec.fields.size(),
                                   header.fields.size()));
    std::string label(trim(rec.fields[0]));
    if (label.empty()) throw ParseError(source_name, rec.line, 1, "empty observation label");
    if (!seen.insert(label).second)
      throw ParseError(source_name, rec.line, 1, fmt::format("duplicate label '{}'", label));
    for (std::size_t c = 1; c < rec.fields.size(); ++c) {
      try {
        cells.push_back(parse_cell(rec.fields[c]));
      } catch (const DataError& e) {
        throw ParseError(source_name, rec.line, c + 1, e.what());
      }
    }
    labels.push_back(std::move(label));
  }
  if (labels.empty()) throw ParseError(source_name, header.line, 0, "table has no observations");
  return ObservationTable(std::move(labels), std::move(variables), std::move(cells));
}

void write_table(std::ostream& out, const ObservationTable& table) {
  std::vector<std::string> fields{"label"};
  for (const auto& v : table.variables()) fields.push_back(v.name);
  csv::write_record(out, fields);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    fields.assign(1, table.labels()[r]);
    for (std::size_t c = 0; c < table.cols(); ++c) fields.push_back(format_cell(table.at(r, c)));
    csv::write_record(out, fields);
  }
}

ObservationTable load_table(const std::string& csv_path,
                            const std::optional<std::string>& meta_path) {
  std::ifstream in(csv_path);
  if (!in) throw RuntimeError("cannot open table '" + csv_path + "'");
  ObservationTable table = parse_table(in, csv_path);
  if (!meta_path) return table;
  std::ifstream meta_in(*meta_path);
  if (!meta_in) throw RuntimeError("cannot open metadata '" + *meta_path + "'");
  return apply_metadata(table, parse_metadata(meta_in, *meta_path));
}

// ---------------------------------------------------------------------------
// Preprocessing

ObservationTable resolve_intervals(const ObservationTable& table) {
  return map_cells(table, table.variables(), [](const Cell& c, std::size_t) -> Cell {
    if (const auto* iv = std::get_if<Interval>(&c)) return (iv->lo + iv->hi) / 2.0;
    return c;
  });
}

ObservationTable angles_to_radians(const ObservationTable& table) {
  constexpr double k = std::numbers::pi / 180.0;
  auto vars = table.variables();
  std::vector<bool> convert(vars.size(), false);
  for (std::size_t c = 0; c < vars.size(); ++c) {
    if (vars[c].kind == VariableKind::angle_degrees) {
      convert[c] = true;
      vars[c].kind = VariableKind::angle_radians;
    }
  }
  return map_cells(table, std::move(vars), [&](const Cell& cell, std::size_t c) -> Cell {
    if (!convert[c]) return cell;
    if (const auto* v = std::get_if<double>(&cell)) return *v * k;
    if (const auto* iv = std::get_if<Interval>(&cell)) return Interval{iv->lo * k, iv->hi * k};
    return cell;
  });
}

ObservationTable subset_variables(const ObservationTable& table, VariableMode mode,
                                  const std::optional<std::vector<std::string>>& keep) {
  std::vector<bool> kept(table.cols(), true);
  const auto& vars = table.variables();
  if (mode == VariableMode::drop_ratios) {
    for (std::size_t c = 0; c < vars.size(); ++c)
      if (vars[c].kind == VariableKind::ratio) kept[c] = false;
  } else if (mode == VariableMode::drop_ratio_components) {
    std::set<std::string_view> components;
    for (const auto& v : vars)
      for (const auto& comp : v.components) components.insert(comp);
    for (std::size_t c = 0; c < vars.size(); ++c)
      if (components.contains(vars[c].name)) kept[c] = false;
  }
  if (keep) {
    std::set<std::string_view> wanted;
    for (const auto& name : *keep) {
      if (!table.find_variable(name))
        throw UsageError(fmt::format("unknown variable '{}' in keep list", name));
      wanted.insert(name);
    }
    for (std::size_t c = 0; c < vars.size(); ++c)
      if (!wanted.contains(vars[c].name)) kept[c] = false;
  }
  return select_columns(table, kept);
}

std::vector<Missingness> missingness(const ObservationTable& table) {
  return count_missing(table.labels(), table.cols(),
                       [&](std::size_t r, std::size_t c) { return is_missing(table.at(r, c)); });
}

std::vector<Missingness> missingness(const ResolvedTable& table) {
  return count_missing(table.labels(), table.cols(),
                       [&](std::size_t r, std::size_t c) { return !table.at(r, c).has_value(); });
}

Missingness overall_missingness(const ObservationTable& table) {
  Missingness total{"overall", 0, 0};
  for (const auto& m : missingness(table)) {
    total.missing += m.missing;
    total.total += m.total;
  }
  return total;
}

ObservationTable filter_by_missingness(const ObservationTable& table, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw UsageError(fmt::format("missingness threshold {} outside [0, 1]", threshold));
  const auto miss = missingness(table);
  std::vector<std::string> labels;
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (miss[r].fraction() > threshold) continue;
    labels.push_back(table.labels()[r]);
    for (std::size_t c = 0; c < table.cols(); ++c) cells.push_back(table.at(r, c));
  }
  if (labels.empty())
    throw DataError(fmt::format("missingness filter {} removed every observation", threshold));
  return ObservationTable(std::move(labels), table.variables(), std::move(cells),
                          table.annotations());
}

// ---------------------------------------------------------------------------
// ResolvedTable

ResolvedTable::ResolvedTable(std::vector<std::string> labels, std::vector<VariableMeta> variables,
                             std::vector<std::optional<double>> values,
                             TableAnnotations annotations, Provenance provenance)
    : labels_(std::move(labels)),
      variables_(std::move(variables)),
      values_(std::move(values)),
      annotations_(std::move(annotations)),
      provenance_(std::move(provenance)) {
  if (values_.size() != labels_.size() * variables_.size())
    throw DataError("resolved table shape mismatch");
  if (provenance_.columns.empty()) provenance_.columns.assign(variables_.size(), ColumnScaling::untouched);
  if (provenance_.columns.size() != variables_.size())
    throw DataError("provenance column count mismatch");
  std::set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw DataError(fmt::format("duplicate observation label '{}'", l));
}

std::optional<std::size_t> ResolvedTable::find_label(std::string_view label) const {
  return index_of(labels_, label);
}

ResolvedTable to_resolved(const ObservationTable& table) {
  Provenance prov;
  prov.intervals_resolved = true;
  prov.radians = any_radians(table.variables());
  prov.columns.assign(table.cols(), ColumnScaling::untouched);
  return ResolvedTable(table.labels(), table.variables(), scalar_values(table),
                       table.annotations(), std::move(prov));
}

ResolvedTable normalize(const ObservationTable& table) {
  auto values = scalar_values(table);
  const std::size_t rows = table.rows();
  const std::size_t cols = table.cols();
  Provenance prov;
  prov.intervals_resolved = true;
  prov.radians = any_radians(table.variables());
  prov.normalized = true;
  prov.columns.assign(cols, ColumnScaling::standardized);

  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t n = 0;
    double sum = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (const auto& v = values[r * cols + c]) {
        lo = n == 0 ? *v : std::min(lo, *v);
        hi = n == 0 ? *v : std::max(hi, *v);
        sum += *v;
        ++n;
      }
    }
    if (n == 0) {
      prov.columns[c] = ColumnScaling::centred_insufficient;
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      if (const auto& v = values[r * cols + c]) ss += (*v - mean) * (*v - mean);
    double sd = 0.0;
    if (n < 2) {
      prov.columns[c] = ColumnScaling::centred_insufficient;
    } else if (lo == hi) {
      prov.columns[c] = ColumnScaling::centred_constant;
    } else {
      sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      auto& v = values[r * cols + c];
      if (!v) continue;
      switch (prov.columns[c]) {
        case ColumnScaling::standardized: *v = (*v - mean) / sd; break;
        case ColumnScaling::centred_constant: *v = 0.0; break;
        default: *v -= mean;
      }
    }
  }
  return ResolvedTable(table.labels(), table.variables(), std::move(values), table.annotations(),
                       std::move(prov));
}

}  // namespace czek
