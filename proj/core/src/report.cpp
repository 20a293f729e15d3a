#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "czek/csv.hpp"
#include "czek/experiments.hpp"

namespace czek {

namespace {

constexpr PlacementCategory kCategories[] = {
    PlacementCategory::interior_own_group, PlacementCategory::boundary,
    PlacementCategory::singleton,          PlacementCategory::grouped_with_other,
    PlacementCategory::interior_other_group, PlacementCategory::mixed,
};

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string filter_text(const std::optional<double>& f) {
  return f ? fmt::format("{}", *f) : std::string("none");
}

std::string category_text(const PlacementReport& r) {
  return r.category ? std::string(to_string(*r.category)) : std::string();
}

std::string emit_csv(const std::vector<PlacementReport>& reports) {
  std::ostringstream out;
  csv::write_record(out, {"setup_id", "hash", "distance", "variable_set", "variable_mode",
                          "angle_unit", "missingness_filter", "normalize", "seed", "status",
                          "observations", "method", "objective", "focal", "category",
                          "left_neighbor", "left_group", "right_neighbor", "right_group",
                          "own_run_length", "group_sequence", "order", "error"});
  for (const auto& r : reports) {
    const auto& s = r.spec;
    csv::write_record(
        out, {std::to_string(r.setup_id), s.hash(), s.distance, s.variable_set,
              std::string(to_string(s.variable_mode)), std::string(to_string(s.angle_unit)),
              filter_text(s.missingness_filter), s.normalize ? "true" : "false",
              std::to_string(s.seed), r.ok ? "ok" : "error",
              r.ok ? std::to_string(r.observations) : "", r.method,
              r.ok ? fmt::format("{:.10g}", r.objective) : "", r.focal, category_text(r),
              r.context.left_label, r.context.left_group, r.context.right_label,
              r.context.right_group,
              r.category ? std::to_string(r.context.own_run_length) : "",
              r.context.group_sequence, join(r.order, "|"), r.error});
  }
  return out.str();
}

nlohmann::json summary_json(const ReportSummary& s) {
  return {{"total", s.total},
          {"by_category", s.by_category},
          {"not_interior_own_group", s.not_interior_own_group}};
}

std::string emit_json(const std::vector<PlacementReport>& reports) {
  nlohmann::json setups = nlohmann::json::array();
  for (const auto& r : reports) {
    const auto& s = r.spec;
    nlohmann::json j{
        {"setup_id", r.setup_id},
        {"hash", s.hash()},
        {"distance", s.distance},
        {"variable_set", s.variable_set},
        {"variable_mode", std::string(to_string(s.variable_mode))},
        {"angle_unit", std::string(to_string(s.angle_unit))},
        {"missingness_filter",
         s.missingness_filter ? nlohmann::json(*s.missingness_filter) : nlohmann::json(nullptr)},
        {"normalize", s.normalize},
        {"seed", s.seed},
        {"status", r.ok ? "ok" : "error"},
        {"focal", r.focal},
    };
    if (!r.ok) {
      j["error"] = r.error;
    } else {
      j["observations"] = r.observations;
      j["method"] = r.method;
      j["objective"] = r.objective;
      j["order"] = r.order;
      j["category"] = r.category ? nlohmann::json(category_text(r)) : nlohmann::json(nullptr);
      if (r.category)
        j["context"] = {{"left_neighbor", r.context.left_label},
                        {"left_group", r.context.left_group},
                        {"right_neighbor", r.context.right_label},
                        {"right_group", r.context.right_group},
                        {"own_run_length", r.context.own_run_length},
                        {"group_sequence", r.context.group_sequence}};
    }
    setups.push_back(std::move(j));
  }
  return nlohmann::json{{"setups", setups}, {"summary", summary_json(summarize(reports))}}.dump(2) +
         "\n";
}

}  // namespace

ReportSummary summarize(const std::vector<PlacementReport>& reports) {
  ReportSummary s;
  s.total = reports.size();
  for (auto c : kCategories) s.by_category[std::string(to_string(c))] = 0;
  s.by_category["error"] = 0;
  s.by_category["unclassified"] = 0;
  for (const auto& r : reports) {
    if (!r.ok) {
      ++s.by_category["error"];
    } else if (!r.category) {
      ++s.by_category["unclassified"];
    } else {
      ++s.by_category[std::string(to_string(*r.category))];
      if (*r.category != PlacementCategory::interior_own_group) ++s.not_interior_own_group;
    }
  }
  return s;
}

std::string emit_report(const std::vector<PlacementReport>& reports, ReportFormat format) {
  return format == ReportFormat::csv ? emit_csv(reports) : emit_json(reports);
}

std::string format_summary(const ReportSummary& summary) {
  std::string out = fmt::format("setups: {}\n", summary.total);
  auto line = [&](const std::string& key) {
    const auto it = summary.by_category.find(key);
    out += fmt::format("  {:<22}{}\n", key, it == summary.by_category.end() ? 0 : it->second);
  };
  for (auto c : kCategories) line(std::string(to_string(c)));
  line("unclassified");
  line("error");
  out += fmt::format("not interior_own_group: {}\n", summary.not_interior_own_group);
  return out;
}

}  // namespace czek
