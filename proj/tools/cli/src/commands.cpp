#include "czek_cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "czek/dataset.hpp"
#include "czek/diagram.hpp"
#include "czek/distance.hpp"
#include "czek/error.hpp"
#include "czek/experiments.hpp"
#include "czek/matrix_compare.hpp"
#include "czek/seriation.hpp"

#ifndef CZEK_VERSION
#define CZEK_VERSION "unknown"
#endif

namespace czek::cli {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, VariableMode> kModes{
    {"all", VariableMode::all},
    {"drop_ratios", VariableMode::drop_ratios},
    {"drop_ratio_components", VariableMode::drop_ratio_components},
};
const std::map<std::string, AngleUnit> kUnits{{"degrees", AngleUnit::degrees},
                                              {"radians", AngleUnit::radians}};
const std::map<std::string, NormalizeChoice> kNormalize{{"true", NormalizeChoice::on},
                                                        {"false", NormalizeChoice::off},
                                                        {"auto", NormalizeChoice::automatic}};
const std::map<std::string, MethodChoice> kMethods{{"auto", MethodChoice::automatic},
                                                   {"exact", MethodChoice::exact},
                                                   {"2opt", MethodChoice::two_opt},
                                                   {"anneal", MethodChoice::anneal}};

std::string percent(std::size_t part, std::size_t whole) {
  return fmt::format("{:.1f}%", whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole));
}

// --- shared flag groups ----------------------------------------------------

struct TableFlags {
  std::string table;
  std::string meta;

  void add(CLI::App* app) {
    app->add_option("--table", table, "observation table (CSV)")->required()->check(CLI::ExistingFile);
    app->add_option("--meta", meta, "metadata sidecar")->check(CLI::ExistingFile);
  }
  ObservationTable load() const {
    return load_table(table, meta.empty() ? std::nullopt : std::optional<std::string>(meta));
  }
};

struct SetupFlags {
  std::string distance = "dd";
  std::string variable_set{kFullVariableSet};
  std::string mode = "all";
  std::string unit = "degrees";
  std::optional<double> missingness;
  std::string normalize = "false";
  std::string ref_a;
  std::string ref_b;
  double tie_tolerance = 0.0;

  void add(CLI::App* app) {
    app->add_option("--distance", distance, "distance name")->capture_default_str();
    app->add_option("--variable-set", variable_set, "named variable set or 'full'")
        ->capture_default_str();
    app->add_option("--variable-mode", mode, "all, drop_ratios or drop_ratio_components")
        ->check(CLI::IsMember(kModes))
        ->capture_default_str();
    app->add_option("--angles", unit, "angle unit: degrees or radians")
        ->check(CLI::IsMember(kUnits))
        ->capture_default_str();
    app->add_option("--missingness", missingness,
                    "drop observations missing more than this fraction")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--normalize", normalize, "standardize columns: true, false or auto")
        ->check(CLI::IsMember(kNormalize))
        ->capture_default_str();
    app->add_option("--ref-a", ref_a, "first reference observation");
    app->add_option("--ref-b", ref_b, "second reference observation");
    app->add_option("--tie-tolerance", tie_tolerance, "in-between band for reference coding")
        ->check(CLI::NonNegativeNumber);
  }

  SetupSpec spec(const DistanceRegistry& registry, std::uint64_t seed) const {
    const DistanceFunction& f = registry.get(distance);
    SetupSpec s;
    s.distance = distance;
    s.variable_set = variable_set;
    s.variable_mode = kModes.at(mode);
    s.angle_unit = kUnits.at(unit);
    s.missingness_filter = missingness;
    s.seed = seed;
    const NormalizeChoice norm = kNormalize.at(normalize);
    s.normalize = norm == NormalizeChoice::on ||
                  (norm == NormalizeChoice::automatic && !f.requires_normalization_off);
    if (s.normalize && f.requires_normalization_off)
      throw UsageError(fmt::format("distance '{}' cannot be used with --normalize true", distance));
    return s;
  }

  void apply(PipelineOptions& options, const ObservationTable& table) const {
    for (const auto* label : {&ref_a, &ref_b})
      if (!label->empty() && !table.find_label(*label))
        throw UsageError(fmt::format("reference observation '{}' is not in the table", *label));
    if (!ref_a.empty()) options.reference_a = ref_a;
    if (!ref_b.empty()) options.reference_b = ref_b;
    options.tie_tolerance = tie_tolerance;
  }
};

struct ClassFlags {
  std::optional<std::size_t> classes;
  std::vector<double> probs;

  void add(CLI::App* app) {
    app->add_option("--classes", classes, "number of symbol classes")->check(CLI::Range(1, 64));
    app->add_option("--probs", probs, "quantile probabilities, comma separated")->delimiter(',');
  }
  std::vector<double> resolve() const {
    if (!probs.empty()) {
      if (classes && *classes != probs.size() + 1)
        throw UsageError(fmt::format("--classes {} needs {} probabilities, got {}", *classes,
                                     *classes - 1, probs.size()));
      return probs;
    }
    return even_probs(classes.value_or(4));
  }
};

struct SeriateFlags {
  std::string method = "auto";
  std::uint64_t seed = 0;
  std::size_t exact_limit = kDefaultExactLimit;
  std::optional<std::size_t> iterations;

  void add(CLI::App* app) {
    app->add_option("--method", method, "auto, exact, 2opt or anneal")
        ->check(CLI::IsMember(kMethods))
        ->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--exact-limit", exact_limit, "largest n solved exactly")->capture_default_str();
    app->add_option("--iterations", iterations, "annealing proposals");
  }
  MethodChoice choice() const { return kMethods.at(method); }
  SeriateOptions options() const {
    SeriateOptions o;
    o.exact_limit = exact_limit;
    if (iterations) o.schedule.iterations = *iterations;
    return o;
  }
};

void write_stream_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  body(s);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_file(path, s.str());
}

// Display width of a UTF-8 label, counted in code points.
std::size_t text_width(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? " | " : "") + labels[i];
  return out;
}

// --- commands --------------------------------------------------------------

int cmd_inspect(const TableFlags& tf, const std::string& variable_set, std::ostream& out) {
  ObservationTable table = tf.load();
  if (!variable_set.empty() && variable_set != kFullVariableSet) {
    const auto& sets = table.annotations().variable_sets;
    const auto it = sets.find(variable_set);
    if (it == sets.end()) throw UsageError(fmt::format("unknown variable set '{}'", variable_set));
    table = subset_variables(table, VariableMode::all, it->second);
  }
  fmt::print(out, "{} observations x {} variables\n", table.rows(), table.cols());

  std::map<std::string, std::size_t> kinds;
  for (const auto& v : table.variables()) ++kinds[std::string(to_string(v.kind))];
  out << "variable kinds:";
  for (const auto& [k, n] : kinds) fmt::print(out, " {} {}", k, n);
  out << "\n";

  const auto& ann = table.annotations();
  if (!ann.groups.empty()) {
    std::map<std::string, std::vector<std::string>> members;
    for (const auto& label : table.labels())
      if (const auto it = ann.groups.find(label); it != ann.groups.end())
        members[it->second].push_back(label);
    out << "groups:\n";
    for (const auto& [g, labels] : members)
      fmt::print(out, "  {} ({}): {}\n", g, labels.size(), join_labels(labels));
  }
  if (ann.focal) fmt::print(out, "focal: {}\n", *ann.focal);
  if (ann.reference_a || ann.reference_b)
    fmt::print(out, "references: {} / {}\n", ann.reference_a.value_or("-"),
               ann.reference_b.value_or("-"));

  out << "missingness:\n";
  std::size_t width = 0;
  for (const auto& l : table.labels()) width = std::max(width, text_width(l));
  for (const auto& m : missingness(table))
    fmt::print(out, "  {}{}  {:>3}/{}  {:>6}\n", m.label, std::string(width - text_width(m.label), ' '),
               m.missing, m.total, percent(m.missing, m.total));
  const auto overall = overall_missingness(table);
  fmt::print(out, "overall: {}/{} = {}\n", overall.missing, overall.total,
             percent(overall.missing, overall.total));
  return kOk;
}

int cmd_distance(const TableFlags& tf, const SetupFlags& sf, const std::string& out_path,
                 std::ostream& out) {
  const auto registry = default_registry();
  const ObservationTable table = tf.load();
  const SetupSpec spec = sf.spec(registry, 0);
  PipelineOptions options;
  sf.apply(options, table);
  const ResolvedTable prepared = prepare_table(table, spec);
  const DistanceMatrix m = setup_matrix(prepared, spec, registry, options);
  write_stream_file(out_path, [&](std::ostream& s) { write_matrix_csv(s, m); });

  std::size_t min_cover = prepared.cols();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) min_cover = std::min(min_cover, m.coverage(i, j));
  fmt::print(out, "{} distance: {} observations x {} variables{}\n", m.distance_name(), m.size(),
             prepared.cols(), spec.normalize ? " (normalized)" : "");
  fmt::print(out, "fewest shared variables in a pair: {}\n", min_cover);
  fmt::print(out, "matrix written to {}\n", out_path);
  return kOk;
}

int cmd_seriate(const std::string& matrix_path, const SeriateFlags& flags, const std::string& json_path,
                const std::string& reordered_path, std::ostream& out) {
  const DistanceMatrix m = load_matrix(matrix_path);
  const SeriationResult r = seriate(m, flags.choice(), flags.seed, flags.options());
  if (!json_path.empty())
    write_stream_file(json_path, [&](std::ostream& s) { s << result_to_json(r, m).dump(2) << "\n"; });
  if (!reordered_path.empty())
    write_stream_file(reordered_path, [&](std::ostream& s) {
      write_matrix_csv(s, m.permuted(r.permutation.order()));
    });
  std::vector<std::string> labels;
  for (std::size_t k : r.permutation.order()) labels.push_back(m.labels()[k]);
  fmt::print(out, "method: {}\nobjective: {}\nidentity objective: {}\norder: {}\n",
             to_string(r.method), r.objective, path_length(Permutation::identity(m.size()), m),
             join_labels(labels));
  return kOk;
}

int cmd_diagram(const std::string& matrix_path, const std::string& order_path, const ClassFlags& cf,
                const std::string& format, const std::string& glyphs, const std::string& output,
                std::ostream& out) {
  const DistanceMatrix m = load_matrix(matrix_path);
  Permutation p = Permutation::identity(m.size());
  std::string method = std::string(to_string(SeriationMethod::identity));
  if (!order_path.empty()) {
    p = load_permutation(order_path, m);
    std::ifstream in(order_path);
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_object() && doc.contains("method") && doc["method"].is_string())
      method = doc["method"].get<std::string>();
  }
  const auto probs = cf.resolve();
  Diagram d = classify(m, p, quantile_breaks(m, probs));
  d.method = method;
  const std::string text =
      format == "svg" ? render_svg(d) : render_text(d, glyphs.empty() ? GlyphSet{} : GlyphSet::parse(glyphs));
  if (output.empty()) {
    out << text;
  } else {
    if (fs::path(output).has_parent_path()) fs::create_directories(fs::path(output).parent_path());
    write_text_file(output, text);
    fmt::print(out, "{} classes, objective {}; {} written to {}\n",
               d.classification.class_count(), d.objective, format, output);
  }
  return kOk;
}

int cmd_pipeline(const TableFlags& tf, const SetupFlags& sf, const SeriateFlags& sflags,
                 const ClassFlags& cf, const std::string& glyphs, const std::string& out_dir,
                 std::ostream& out, std::ostream& err) {
  const auto registry = default_registry();
  const ObservationTable table = tf.load();
  const SetupSpec spec = sf.spec(registry, sflags.seed);
  PipelineOptions options;
  sf.apply(options, table);
  options.method = sflags.choice();
  options.seriate = sflags.options();
  options.probs = cf.resolve();
  if (!glyphs.empty()) options.glyphs = GlyphSet::parse(glyphs);

  const SetupOutcome outcome = run_setup(table, spec, registry, options, 1);
  write_setup_artifacts(out_dir, outcome, options);
  const auto& r = outcome.report;
  if (!r.ok) {
    err << "czek pipeline: " << r.error << "\n";
    switch (r.error_kind) {
      case ErrorKind::usage: return kUsage;
      case ErrorKind::data: return kData;
      case ErrorKind::runtime: return kRuntime;
    }
  }
  fmt::print(out, "setup {}: {}\n", spec.hash(), spec.canonical());
  fmt::print(out, "observations: {}\nmethod: {}\nobjective: {}\norder: {}\n", r.observations,
             r.method, r.objective, join_labels(r.order));
  if (r.category)
    fmt::print(out, "placement of {}: {} ({})\n", r.focal, to_string(*r.category),
               r.context.group_sequence);
  fmt::print(out, "artifacts written to {}\n", out_dir);
  return kOk;
}

int cmd_grid(const std::string& config_path, const TableFlags& tf, const std::string& out_dir,
             std::size_t jobs, std::ostream& out) {
  const auto registry = default_registry();
  const GridConfig config = load_grid_config(config_path);
  const ObservationTable table = tf.load();
  const GridRun run = run_grid(table, config, registry, fs::path(out_dir), jobs);
  const auto& ex = run.expansion;
  fmt::print(out, "cartesian product: {}, runnable: {}, skipped: {}\n", ex.cartesian_size,
             ex.setups.size(), ex.skipped.size());
  out << format_summary(summarize(run.reports));
  fmt::print(out, "reports written to {}\n", out_dir);
  return kOk;
}

int cmd_compare(const std::string& matrix_path, const std::string& reference_path,
                const std::vector<std::string>& excludes, double tolerance, double max_fraction,
                std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> excluded;
  for (const auto& e : excludes) {
    const auto colon = e.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == e.size())
      throw UsageError(fmt::format("--exclude expects LABEL:LABEL, got '{}'", e));
    excluded.emplace_back(e.substr(0, colon), e.substr(colon + 1));
  }
  const MatrixComparison c =
      compare_matrices(load_matrix(matrix_path), load_matrix(reference_path), tolerance, excluded);
  fmt::print(out, "cells compared: {} ({} excluded)\n", c.compared, c.cells.size() - c.compared);
  out << "relative difference histogram:\n";
  for (std::size_t b = 0; b < c.histogram.size(); ++b) {
    const std::string range =
        b + 1 < c.bin_edges.size()
            ? fmt::format("[{:.0f}%, {:.0f}%)", 100 * c.bin_edges[b], 100 * c.bin_edges[b + 1])
            : fmt::format(">= {:.0f}%", 100 * c.bin_edges[b]);
    fmt::print(out, "  {:<12} {}\n", range, c.histogram[b]);
  }
  fmt::print(out, "cells at or above {:.1f}%: {} ({})\n", 100 * tolerance, c.exceeding,
             percent(c.exceeding, c.compared));
  for (const auto& cell : c.cells)
    if (!cell.excluded && cell.relative_difference >= tolerance)
      fmt::print(out, "  {} / {}: {} vs {} ({:.1f}%)\n", cell.row, cell.col, cell.ours,
                 cell.reference, 100 * cell.relative_difference);
  const bool pass = c.exceeding_fraction() <= max_fraction;
  fmt::print(out, "{}: allowed fraction {:.1f}%\n", pass ? "PASS" : "FAIL", 100 * max_fraction);
  return pass ? kOk : 1;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seriated distance diagrams for incomplete tabular data", "czek"};
  app.set_version_flag("--version", std::string("czek ") + CZEK_VERSION);
  app.require_subcommand(1);

  TableFlags tf;
  SetupFlags sf;
  SeriateFlags sflags;
  ClassFlags cf;
  std::string variable_set, out_path, matrix_path, json_path, reordered_path, order_path;
  std::string format = "txt", glyphs, output, config_path, reference_path;
  std::size_t jobs = 1;
  std::vector<std::string> excludes;
  double tolerance = 0.04, max_fraction = 0.1;

  auto* inspect = app.add_subcommand("inspect", "summarize a table and its missingness");
  tf.add(inspect);
  inspect->add_option("--variable-set", variable_set, "restrict to a named variable set");

  auto* distance = app.add_subcommand("distance", "compute a distance matrix");
  tf.add(distance);
  sf.add(distance);
  distance->add_option("--out", out_path, "matrix CSV to write")->required();

  auto* ser = app.add_subcommand("seriate", "order a distance matrix");
  ser->add_option("--matrix", matrix_path, "matrix CSV")->required()->check(CLI::ExistingFile);
  sflags.add(ser);
  ser->add_option("--json", json_path, "permutation JSON to write");
  ser->add_option("--reordered", reordered_path, "reordered matrix CSV to write");

  auto* diag = app.add_subcommand("diagram", "render a diagram");
  diag->add_option("--matrix", matrix_path, "matrix CSV")->required()->check(CLI::ExistingFile);
  diag->add_option("--order", order_path, "permutation JSON (identity if absent)")
      ->check(CLI::ExistingFile);
  cf.add(diag);
  diag->add_option("--out", format, "txt or svg")->check(CLI::IsMember({"txt", "svg"}))->capture_default_str();
  diag->add_option("--glyphs", glyphs, "text glyphs, largest symbol first");
  diag->add_option("--output", output, "file to write (standard output if absent)");

  auto* pipe = app.add_subcommand("pipeline", "run one setup end to end");
  tf.add(pipe);
  sf.add(pipe);
  sflags.add(pipe);
  cf.add(pipe);
  pipe->add_option("--glyphs", glyphs, "text glyphs, largest symbol first");
  pipe->add_option("--out-dir", out_path, "artifact directory")->required();

  auto* grid = app.add_subcommand("grid", "run a setup grid");
  grid->add_option("--config", config_path, "grid config")->required()->check(CLI::ExistingFile);
  tf.add(grid);
  grid->add_option("--out", out_path, "output directory")->required();
  grid->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();

  auto* cmp = app.add_subcommand("compare", "compare a matrix with a reference matrix");
  cmp->add_option("--matrix", matrix_path, "our matrix CSV")->required()->check(CLI::ExistingFile);
  cmp->add_option("--reference", reference_path, "reference matrix CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--exclude", excludes, "LABEL:LABEL pair to leave out (repeatable)");
  cmp->add_option("--tolerance", tolerance, "relative difference threshold")->capture_default_str();
  cmp->add_option("--max-exceed-fraction", max_fraction, "allowed fraction of cells above it")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (inspect->parsed()) return cmd_inspect(tf, variable_set, out);
  if (distance->parsed()) return cmd_distance(tf, sf, out_path, out);
  if (ser->parsed()) return cmd_seriate(matrix_path, sflags, json_path, reordered_path, out);
  if (diag->parsed()) return cmd_diagram(matrix_path, order_path, cf, format, glyphs, output, out);
  if (pipe->parsed()) return cmd_pipeline(tf, sf, sflags, cf, glyphs, out_path, out, err);
  if (grid->parsed()) return cmd_grid(config_path, tf, out_path, jobs, out);
  return cmd_compare(matrix_path, reference_path, excludes, tolerance, max_fraction, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(argc, argv, out, err);
  } catch (const Error& e) {
    err << "czek: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::usage: return kUsage;
      case ErrorKind::data: return kData;
      case ErrorKind::runtime: return kRuntime;
    }
    return kRuntime;
  } catch (const std::exception& e) {
    err << "czek: " << e.what() << "\n";
    return kRuntime;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"czek"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace czek::cli
