#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "czek/dataset.hpp"
#include "czek/diagram.hpp"
#include "czek/distance.hpp"
#include "czek/error.hpp"
#include "czek/seriation.hpp"

namespace czek {

// ---------------------------------------------------------------------------
// Placement of a focal observation
// ---------------------------------------------------------------------------

enum class PlacementCategory {
  interior_own_group,
  boundary,
  singleton,
  grouped_with_other,
  interior_other_group,
  mixed,
};

std::string_view to_string(PlacementCategory c);
std::optional<PlacementCategory> placement_category_from_string(std::string_view s);

/// Raw neighbourhood of the focal observation, emitted so that a person can
/// re-adjudicate the automatic category.
struct PlacementContext {
  std::string left_label;  // empty at the start of the order
  std::string left_group;
  std::string right_label;  // empty at the end of the order
  std::string right_group;
  std::size_t own_run_length = 0;  // maximal own-group run containing the focal
  std::string group_sequence;      // groups in order, focal as [group]

  bool operator==(const PlacementContext&) const = default;
};

struct Placement {
  PlacementCategory category = PlacementCategory::mixed;
  PlacementContext context;
};

/// Rules, on the focal's maximal own-group run R (length r) and its
/// immediate neighbours (an endpoint uses its single neighbour):
///   1. 2 <= r <= 3 and R is flanked on both sides by other-group
///      observations -> grouped_with_other.
///   2. every neighbour is own-group -> interior_own_group.
///   3. r == 1, neighbours from two different other groups -> mixed.
///   4. r == 1, both neighbours in one other group G, and at least two G
///      members on each side before anything else -> interior_other_group;
///      any other r == 1 case (including endpoints) -> singleton.
///   5. one own-group and one other-group neighbour -> boundary.
/// Symmetric under reversal of the order. Throws DataError when the focal is
/// absent, a label has no group, or `groups` names fewer than two groups.
Placement classify_placement(const std::vector<std::string>& ordered_labels,
                             const std::map<std::string, std::string>& groups,
                             std::string_view focal);

// ---------------------------------------------------------------------------
// Setup grid
// ---------------------------------------------------------------------------

enum class AngleUnit { degrees, radians };
std::string_view to_string(AngleUnit u);

/// `automatic` normalizes unless the distance forbids it.
enum class NormalizeChoice { off, on, automatic };


struct SetupSpec {
  std::string distance = "dd";
  std::string variable_set{kFullVariableSet};
  VariableMode variable_mode = VariableMode::all;
  AngleUnit angle_unit = AngleUnit::degrees;
  std::optional<double> missingness_filter;
  bool normalize = false;
  std::uint64_t seed = 0;

  /// "distance=dd;variable_set=full;..." in fixed key order.
  std::string canonical() const;
  /// 16 hex digits of FNV-1a 64 over canonical().
  std::string hash() const;

  bool operator==(const SetupSpec&) const = default;
};

struct SetupAxes {
  std::vector<std::string> distances;
  std::vector<std::string> variable_sets;
  std::vector<VariableMode> variable_modes;
  std::vector<AngleUnit> angle_units;
  std::vector<std::optional<double>> missingness_filters;
  std::vector<NormalizeChoice> normalize;
  std::vector<std::uint64_t> seeds;

  std::size_t cartesian_size() const;
};

struct SkippedSetup {
  SetupSpec spec;
  std::string reason;
};

struct GridExpansion {
  std::vector<SetupSpec> setups;
  std::vector<SkippedSetup> skipped;
  std::size_t cartesian_size = 0;  // setups.size() + skipped.size()
};

/// Nested loops in axis order distance, variable_set, variable_mode,
/// angle_unit, missingness_filter, normalize, seed. Combinations asking a
/// normalization-forbidding distance to normalize are skipped, as are repeats
/// produced by `automatic`. Throws UsageError for an empty axis, a repeated
/// axis value, or an unregistered distance.
GridExpansion expand_grid(const SetupAxes& axes, const DistanceRegistry& registry);

/// Knobs shared by every setup of a run.
struct PipelineOptions {
  MethodChoice method = MethodChoice::automatic;
  SeriateOptions seriate{};
  std::vector<double> probs{0.25, 0.5, 0.75};
  std::optional<std::string> reference_a;  // override table annotations
  std::optional<std::string> reference_b;
  double tie_tolerance = 0.0;
  GlyphSet glyphs{};
  DiagramStyle style{};
};

struct GridConfig {
  SetupAxes axes;
  PipelineOptions pipeline;
};

/// Grid config in the key-value format (see docs/formats.md). Unknown
/// sections or keys are rejected.
GridConfig parse_grid_config(std::istream& in, const std::string& source_name);
GridConfig load_grid_config(const std::string& path);

/// Registry used by the CLI and grid runner: the built-ins plus the
/// `euclidean` custom distance.
DistanceRegistry default_registry();

/// subset -> angle conversion -> interval resolution -> missingness filter ->
/// optional normalization. Throws on any stage failure.
ResolvedTable prepare_table(const ObservationTable& table, const SetupSpec& spec);

/// Distance stage for a prepared table, taking references from the options or
/// the table annotations.
DistanceMatrix setup_matrix(const ResolvedTable& table, const SetupSpec& spec,
                            const DistanceRegistry& registry, const PipelineOptions& options);

struct PlacementReport {
  std::size_t setup_id = 0;  // 1-based position in the expansion
  SetupSpec spec;
  bool ok = false;
  std::string error;  // stage-prefixed message when !ok
  ErrorKind error_kind = ErrorKind::runtime;
  std::size_t observations = 0;
  std::vector<std::string> order;  // labels in seriated order
  double objective = 0.0;
  std::string method;
  std::string focal;
  std::optional<PlacementCategory> category;
  PlacementContext context;
};

struct SetupOutcome {
  PlacementReport report;
  std::optional<DistanceMatrix> matrix;
  std::optional<SeriationResult> seriation;
  std::optional<Diagram> diagram;
};

/// Full pipeline for one setup. Never throws for pipeline failures; they are
/// recorded in report.error. Needs table annotations with a focal label and
/// groups for the placement step (otherwise category stays empty).
SetupOutcome run_setup(const ObservationTable& table, const SetupSpec& spec,
                       const DistanceRegistry& registry, const PipelineOptions& options,
                       std::size_t setup_id = 0);

/// Writes matrix.csv, permutation.json, diagram.txt, diagram.svg and
/// setup.json into `dir` (created if needed); absent artifacts are skipped.
void write_setup_artifacts(const std::filesystem::path& dir, const SetupOutcome& outcome,
                           const PipelineOptions& options);

/// Writes `text` to `path`, throwing RuntimeError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct GridRun {
  GridExpansion expansion;
  std::vector<PlacementReport> reports;  // expansion order
};

/// Runs every setup with up to `jobs` worker threads. Reports come back in
/// expansion order regardless of completion order. When `out_dir` is set,
/// per-setup artifacts go to out_dir/setups/<hash>/ and report.csv,
/// report.json and skipped.csv to out_dir.
GridRun run_grid(const ObservationTable& table, const GridConfig& config,
                 const DistanceRegistry& registry,
                 const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                 std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { csv, json };

struct ReportSummary {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_category;  // categories, "unclassified", "error"
  std::size_t not_interior_own_group = 0;          // successful setups only
};

ReportSummary summarize(const std::vector<PlacementReport>& reports);

/// CSV: header plus one row per report, fixed column order. JSON: object with
/// "setups" and "summary".
std::string emit_report(const std::vector<PlacementReport>& reports, ReportFormat format);

std::string format_summary(const ReportSummary& summary);

}  // namespace czek
