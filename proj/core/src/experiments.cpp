#include "czek/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "czek/csv.hpp"
#include "czek/keyvalue.hpp"

namespace czek {

namespace {

std::string format_filter(const std::optional<double>& f) {
  return f ? fmt::format("{}", *f) : std::string("none");
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void require_axis(const std::vector<T>& axis, std::string_view name) {
  if (axis.empty()) throw UsageError(fmt::format("grid axis '{}' is empty", name));
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = i + 1; j < axis.size(); ++j)
      if (axis[i] == axis[j]) throw UsageError(fmt::format("grid axis '{}' repeats a value", name));
}

// --- config value parsing --------------------------------------------------

[[noreturn]] void config_fail(const kv::Document& doc, const kv::Entry& e, const std::string& msg) {
  throw ParseError(doc.source, e.line, 0, msg);
}

double to_double(const kv::Document& doc, const kv::Entry& e, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    config_fail(doc, e, fmt::format("'{}' is not a number", s));
  return v;
}

std::uint64_t to_uint(const kv::Document& doc, const kv::Entry& e, std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    config_fail(doc, e, fmt::format("'{}' is not a non-negative integer", s));
  return v;
}

const std::vector<std::string>& list_of(const kv::Document& doc, const kv::Entry& e) {
  if (!e.is_list) config_fail(doc, e, fmt::format("'{}' expects a list", e.key));
  return e.values;
}

const std::string& scalar_of(const kv::Document& doc, const kv::Entry& e) {
  if (e.is_list) config_fail(doc, e, fmt::format("'{}' expects a single value", e.key));
  return e.values.front();
}

template <class T, class F>
std::vector<T> map_list(const kv::Document& doc, const kv::Entry& e, F&& f) {
  std::vector<T> out;
  for (const auto& v : list_of(doc, e)) out.push_back(f(v));
  return out;
}

// --- artifacts -------------------------------------------------------------

nlohmann::json spec_json(const SetupSpec& s) {
  nlohmann::json j{
      {"distance", s.distance},
      {"variable_set", s.variable_set},
      {"variable_mode", std::string(to_string(s.variable_mode))},
      {"angle_unit", std::string(to_string(s.angle_unit))},
      {"normalize", s.normalize},
      {"seed", s.seed},
      {"hash", s.hash()},
  };
  j["missingness_filter"] = s.missingness_filter ? nlohmann::json(*s.missingness_filter) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string_view to_string(AngleUnit u) { return u == AngleUnit::degrees ? "degrees" : "radians"; }

std::string SetupSpec::canonical() const {
  return fmt::format(
      "distance={};variable_set={};variable_mode={};angle_unit={};missingness_filter={};"
      "normalize={};seed={}",
      distance, variable_set, to_string(variable_mode), to_string(angle_unit),
      format_filter(missingness_filter), normalize ? "true" : "false", seed);
}

std::string SetupSpec::hash() const { return fmt::format("{:016x}", fnv1a(canonical())); }

std::size_t SetupAxes::cartesian_size() const {
  return distances.size() * variable_sets.size() * variable_modes.size() * angle_units.size() *
         missingness_filters.size() * normalize.size() * seeds.size();
}

GridExpansion expand_grid(const SetupAxes& axes, const DistanceRegistry& registry) {
  require_axis(axes.distances, "distances");
  require_axis(axes.variable_sets, "variable_sets");
  require_axis(axes.variable_modes, "variable_modes");
  require_axis(axes.angle_units, "angle_units");
  require_axis(axes.missingness_filters, "missingness_filters");
  require_axis(axes.normalize, "normalize");
  require_axis(axes.seeds, "seeds");
  for (const auto& f : axes.missingness_filters)
    if (f && !(*f >= 0.0 && *f <= 1.0))
      throw UsageError(fmt::format("missingness filter {} outside [0, 1]", *f));

  GridExpansion out;
  out.cartesian_size = axes.cartesian_size();
  std::map<std::string, std::size_t> seen;  // canonical -> 1-based setup number
  for (const auto& dist : axes.distances) {
    const bool forbids = registry.get(dist).requires_normalization_off;
    for (const auto& vset : axes.variable_sets)
      for (auto mode : axes.variable_modes)
        for (auto unit : axes.angle_units)
          for (const auto& filter : axes.missingness_filters)
            for (auto norm : axes.normalize)
              for (auto seed : axes.seeds) {
                SetupSpec s{dist, vset, mode, unit, filter, false, seed};
                s.normalize = norm == NormalizeChoice::on ||
                              (norm == NormalizeChoice::automatic && !forbids);
                if (s.normalize && forbids) {
                  out.skipped.push_back(
                      {s, fmt::format("distance '{}' forbids normalization", dist)});
                  continue;
                }
                const auto [it, fresh] = seen.emplace(s.canonical(), out.setups.size() + 1);
                if (!fresh) {
                  out.skipped.push_back({s, fmt::format("duplicate of setup {}", it->second)});
                  continue;
                }
                out.setups.push_back(std::move(s));
              }
  }
  return out;
}

GridConfig parse_grid_config(std::istream& in, const std::string& source_name) {
  const kv::Document doc = kv::parse(in, source_name);
  GridConfig cfg;
  auto& axes = cfg.axes;
  axes.variable_sets = {std::string(kFullVariableSet)};
  axes.variable_modes = {VariableMode::all};
  axes.angle_units = {AngleUnit::degrees};
  axes.missingness_filters = {std::nullopt};
  axes.normalize = {NormalizeChoice::automatic};
  axes.seeds = {0};
  std::optional<std::size_t> classes;
  bool have_probs = false;
  std::set<std::pair<std::string, std::string>> seen;

  for (const auto& sec : doc.sections)
    if (sec.name != "grid" && sec.name != "seriation" && sec.name != "diagram" && sec.name != "distance")
      throw ParseError(doc.source, sec.line, 0, fmt::format("unknown section [{}]", sec.name));

  for (const auto& e : doc.entries) {
    if (!seen.insert({e.section, e.key}).second)
      config_fail(doc, e, fmt::format("duplicate key '{}' in [{}]", e.key, e.section));
    const std::string where = e.section + "." + e.key;
    if (where == "grid.distances") {
      axes.distances = list_of(doc, e);
    } else if (where == "grid.variable_sets") {
      axes.variable_sets = list_of(doc, e);
    } else if (where == "grid.variable_modes") {
      axes.variable_modes = map_list<VariableMode>(doc, e, [&](const std::string& v) {
        const auto m = variable_mode_from_string(v);
        if (!m) config_fail(doc, e, fmt::format("unknown variable mode '{}'", v));
        return *m;
      });
    } else if (where == "grid.angle_units") {
      axes.angle_units = map_list<AngleUnit>(doc, e, [&](const std::string& v) {
        if (v == "degrees") return AngleUnit::degrees;
        if (v == "radians") return AngleUnit::radians;
        config_fail(doc, e, fmt::format("unknown angle unit '{}'", v));
      });
    } else if (where == "grid.missingness_filters") {
      axes.missingness_filters = map_list<std::optional<double>>(
          doc, e, [&](const std::string& v) -> std::optional<double> {
            if (v == "none") return std::nullopt;
            return to_double(doc, e, v);
          });
    } else if (where == "grid.normalize") {
      axes.normalize = map_list<NormalizeChoice>(doc, e, [&](const std::string& v) {
        if (v == "true") return NormalizeChoice::on;
        if (v == "false") return NormalizeChoice::off;
        if (v == "auto") return NormalizeChoice::automatic;
        config_fail(doc, e, fmt::format("normalize values are true, false or auto, not '{}'", v));
      });
    } else if (where == "grid.seeds") {
      axes.seeds = map_list<std::uint64_t>(doc, e, [&](const std::string& v) { return to_uint(doc, e, v); });
    } else if (where == "seriation.method") {
      const auto m = method_choice_from_string(scalar_of(doc, e));
      if (!m) config_fail(doc, e, fmt::format("unknown seriation method '{}'", scalar_of(doc, e)));
      cfg.pipeline.method = *m;
    } else if (where == "seriation.exact_limit") {
      cfg.pipeline.seriate.exact_limit = to_uint(doc, e, scalar_of(doc, e));
    } else if (where == "seriation.anneal_temperature") {
      cfg.pipeline.seriate.schedule.initial_temperature = to_double(doc, e, scalar_of(doc, e));
    } else if (where == "seriation.anneal_cooling") {
      cfg.pipeline.seriate.schedule.cooling = to_double(doc, e, scalar_of(doc, e));
    } else if (where == "seriation.anneal_iterations") {
      cfg.pipeline.seriate.schedule.iterations = to_uint(doc, e, scalar_of(doc, e));
    } else if (where == "diagram.classes") {
      classes = to_uint(doc, e, scalar_of(doc, e));
    } else if (where == "diagram.probs") {
      cfg.pipeline.probs = map_list<double>(doc, e, [&](const std::string& v) { return to_double(doc, e, v); });
      have_probs = true;
    } else if (where == "diagram.glyphs") {
      cfg.pipeline.glyphs = GlyphSet::parse(scalar_of(doc, e));
    } else if (where == "distance.reference_a") {
      cfg.pipeline.reference_a = scalar_of(doc, e);
    } else if (where == "distance.reference_b") {
      cfg.pipeline.reference_b = scalar_of(doc, e);
    } else if (where == "distance.tie_tolerance") {
      cfg.pipeline.tie_tolerance = to_double(doc, e, scalar_of(doc, e));
    } else {
      config_fail(doc, e, fmt::format("unknown key '{}' in [{}]", e.key, e.section));
    }
  }
  if (axes.distances.empty())
    throw ParseError(source_name, 0, 0, "grid config needs [grid] distances");
  if (classes) {
    if (have_probs && cfg.pipeline.probs.size() + 1 != *classes)
      throw ParseError(source_name, 0, 0, "diagram classes and probs disagree");
    if (!have_probs) cfg.pipeline.probs = even_probs(*classes);
  }
  return cfg;
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open grid config '" + path + "'");
  return parse_grid_config(in, path);
}

DistanceRegistry default_registry() {
  auto r = DistanceRegistry::with_builtins();
  r.register_distance(euclidean_function());
  return r;
}

ResolvedTable prepare_table(const ObservationTable& table, const SetupSpec& spec) {
  std::optional<std::vector<std::string>> keep;
  if (spec.variable_set != kFullVariableSet) {
    const auto& sets = table.annotations().variable_sets;
    const auto it = sets.find(spec.variable_set);
    if (it == sets.end())
      throw UsageError(fmt::format("unknown variable set '{}'", spec.variable_set));
    keep = it->second;
  }
  ObservationTable t = subset_variables(table, spec.variable_mode, keep);
  if (t.cols() == 0) throw DataError("no variables left after subsetting");
  if (spec.angle_unit == AngleUnit::radians) t = angles_to_radians(t);
  t = resolve_intervals(t);
  if (spec.missingness_filter) t = filter_by_missingness(t, *spec.missingness_filter);
  return spec.normalize ? normalize(t) : to_resolved(t);
}

DistanceMatrix setup_matrix(const ResolvedTable& table, const SetupSpec& spec,
                            const DistanceRegistry& registry, const PipelineOptions& options) {
  const DistanceFunction& f = registry.get(spec.distance);
  auto present = [&](const std::optional<std::string>& override_label,
                     const std::optional<std::string>& annotated) -> std::optional<std::string> {
    const auto& label = override_label ? override_label : annotated;
    if (label && table.find_label(*label)) return label;
    return std::nullopt;
  };
  DistanceContext ctx;
  ctx.tie_tolerance = options.tie_tolerance;
  auto row_of = [&](const std::optional<std::string>& label) {
    const auto idx = table.find_label(*label);
    const auto row = table.row(*idx);
    return std::vector<std::optional<double>>(row.begin(), row.end());
  };
  // A reference dropped by the missingness filter is simply absent; only a
  // distance that needs it will complain.
  if (const auto a = present(options.reference_a, table.annotations().reference_a))
    ctx.reference_a = row_of(a);
  if (const auto b = present(options.reference_b, table.annotations().reference_b))
    ctx.reference_b = row_of(b);
  return compute_matrix(table, f, ctx);
}

SetupOutcome run_setup(const ObservationTable& table, const SetupSpec& spec,
                       const DistanceRegistry& registry, const PipelineOptions& options,
                       std::size_t setup_id) {
  SetupOutcome out;
  auto& rep = out.report;
  rep.setup_id = setup_id;
  rep.spec = spec;
  rep.focal = table.annotations().focal.value_or("");
  std::string stage = "preprocess";
  try {
    const ResolvedTable prepared = prepare_table(table, spec);
    rep.observations = prepared.rows();

    stage = "distance";
    out.matrix = setup_matrix(prepared, spec, registry, options);

    stage = "seriation";
    out.seriation = seriate(*out.matrix, options.method, spec.seed, options.seriate);
    rep.objective = out.seriation->objective;
    rep.method = std::string(to_string(out.seriation->method));
    for (std::size_t k : out.seriation->permutation.order())
      rep.order.push_back(out.matrix->labels()[k]);

    stage = "diagram";
    const auto classes = quantile_breaks(*out.matrix, options.probs);
    out.diagram = classify(*out.matrix, out.seriation->permutation, classes);
    out.diagram->method = rep.method;

    stage = "placement";
    if (table.annotations().focal) {
      const Placement p = classify_placement(rep.order, table.annotations().groups, rep.focal);
      rep.category = p.category;
      rep.context = p.context;
    }
    rep.ok = true;
  } catch (const Error& e) {
    rep.ok = false;
    rep.error = stage + ": " + e.what();
    rep.error_kind = e.kind();
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.error = stage + ": " + e.what();
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw RuntimeError("failed writing '" + path.string() + "'");
}

void write_setup_artifacts(const std::filesystem::path& dir, const SetupOutcome& outcome,
                           const PipelineOptions& options) {
  std::filesystem::create_directories(dir);
  nlohmann::json setup = spec_json(outcome.report.spec);
  setup["setup_id"] = outcome.report.setup_id;
  setup["ok"] = outcome.report.ok;
  if (!outcome.report.ok) setup["error"] = outcome.report.error;
  write_text_file(dir / "setup.json", setup.dump(2) + "\n");

  if (outcome.matrix) {
    std::ostringstream m;
    write_matrix_csv(m, *outcome.matrix);
    write_text_file(dir / "matrix.csv", m.str());
  }
  if (outcome.matrix && outcome.seriation)
    write_text_file(dir / "permutation.json",
                    result_to_json(*outcome.seriation, *outcome.matrix).dump(2) + "\n");
  if (outcome.diagram) {
    write_text_file(dir / "diagram.txt", render_text(*outcome.diagram, options.glyphs));
    write_text_file(dir / "diagram.svg", render_svg(*outcome.diagram, options.style));
  }
}

GridRun run_grid(const ObservationTable& table, const GridConfig& config,
                 const DistanceRegistry& registry,
                 const std::optional<std::filesystem::path>& out_dir, std::size_t jobs) {
  GridRun run;
  run.expansion = expand_grid(config.axes, registry);
  for (const auto& name : config.axes.variable_sets)
    if (name != kFullVariableSet && !table.annotations().variable_sets.contains(name))
      throw UsageError(fmt::format("grid names unknown variable set '{}'", name));

  const auto& setups = run.expansion.setups;
  run.reports.resize(setups.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < setups.size(); i = next++) {
      SetupOutcome outcome = run_setup(table, setups[i], registry, config.pipeline, i + 1);
      if (out_dir) {
        try {
          write_setup_artifacts(*out_dir / "setups" / setups[i].hash(), outcome, config.pipeline);
        } catch (const std::exception& e) {
          outcome.report.ok = false;
          outcome.report.error = std::string("artifacts: ") + e.what();
        }
      }
      run.reports[i] = std::move(outcome.report);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(setups.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text_file(*out_dir / "report.csv", emit_report(run.reports, ReportFormat::csv));
    write_text_file(*out_dir / "report.json", emit_report(run.reports, ReportFormat::json));
    std::ostringstream skipped;
    csv::write_record(skipped, {"distance", "variable_set", "variable_mode", "angle_unit",
                                "missingness_filter", "normalize", "seed", "reason"});
    for (const auto& s : run.expansion.skipped)
      csv::write_record(skipped, {s.spec.distance, s.spec.variable_set,
                                  std::string(to_string(s.spec.variable_mode)),
                                  std::string(to_string(s.spec.angle_unit)),
                                  format_filter(s.spec.missingness_filter),
                                  s.spec.normalize ? "true" : "false",
                                  std::to_string(s.spec.seed), s.reason});
    write_text_file(*out_dir / "skipped.csv", skipped.str());
    write_text_file(*out_dir / "summary.txt", format_summary(summarize(run.reports)));
  }
  return run;
}

}  // namespace czek
