#include <fmt/format.h>

#include <set>

#include "czek/dataset.hpp"
#include "czek/error.hpp"
#include "czek/keyvalue.hpp"

namespace czek {

namespace {

[[noreturn]] void fail(const kv::Document& doc, const kv::Entry& e, const std::string& message) {
  throw ParseError(doc.source, e.line, 0, message);
}

}  // namespace

TableMetadata parse_metadata(std::istream& in, const std::string& source_name) {
  const kv::Document doc = kv::parse(in, source_name);
  TableMetadata meta;
  std::set<std::pair<std::string, std::string>> seen;

  for (const auto& sec : doc.sections)
    if (sec.name != "table" && sec.name != "kinds" && sec.name != "ratios" && sec.name != "groups" &&
        sec.name != "variable_sets")
      throw ParseError(doc.source, sec.line, 0, fmt::format("unknown section [{}]", sec.name));

  for (const auto& e : doc.entries) {
    if (!seen.insert({e.section, e.key}).second)
      fail(doc, e, fmt::format("duplicate key '{}' in [{}]", e.key, e.section));
    try {
      if (e.section == "table") {
        if (e.key == "focal")
          meta.annotations.focal = e.scalar();
        else if (e.key == "reference_a")
          meta.annotations.reference_a = e.scalar();
        else if (e.key == "reference_b")
          meta.annotations.reference_b = e.scalar();
        else
          fail(doc, e, fmt::format("unknown key '{}' in [table]", e.key));
      } else if (e.section == "kinds") {
        const auto kind = variable_kind_from_string(e.scalar());
        if (!kind || *kind == VariableKind::angle_radians)
          fail(doc, e, fmt::format("unknown variable kind '{}' (plain, angle_degrees, ratio)",
                                   e.scalar()));
        meta.kinds[e.key] = *kind;
      } else if (e.section == "ratios") {
        if (!e.is_list || e.values.empty())
          fail(doc, e, fmt::format("ratio '{}' needs a nonempty component list", e.key));
        meta.ratio_components[e.key] = e.values;
      } else if (e.section == "groups") {
        meta.annotations.groups[e.key] = e.scalar();
      } else if (e.section == "variable_sets") {
        if (e.key == kFullVariableSet)
          fail(doc, e, "variable set name 'full' is reserved for all variables");
        if (!e.is_list) fail(doc, e, fmt::format("variable set '{}' must be a list", e.key));
        meta.annotations.variable_sets[e.key] = e.values;
      } else if (e.section.empty()) {
        fail(doc, e, fmt::format("key '{}' outside any section", e.key));
      } else {
        fail(doc, e, fmt::format("unknown section [{}]", e.section));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& err) {
      fail(doc, e, err.what());
    }
  }
  return meta;
}

ObservationTable apply_metadata(const ObservationTable& table, const TableMetadata& meta) {
  auto vars = table.variables();
  auto require_variable = [&](const std::string& name, std::string_view where) {
    const auto idx = table.find_variable(name);
    if (!idx) throw DataError(fmt::format("{}: unknown variable '{}'", where, name));
    return *idx;
  };
  auto require_label = [&](const std::string& label, std::string_view where) {
    if (!table.find_label(label))
      throw DataError(fmt::format("{}: unknown observation '{}'", where, label));
  };

  for (const auto& [name, kind] : meta.kinds) vars[require_variable(name, "kinds")].kind = kind;
  for (const auto& [name, comps] : meta.ratio_components) {
    auto& v = vars[require_variable(name, "ratios")];
    if (meta.kinds.contains(name) && v.kind != VariableKind::ratio)
      throw DataError(fmt::format("ratios: '{}' is declared {} in [kinds]", name, to_string(v.kind)));
    v.kind = VariableKind::ratio;
    for (const auto& comp : comps) {
      require_variable(comp, "ratio components");
      if (comp == name) throw DataError(fmt::format("ratio '{}' lists itself as a component", name));
    }
    v.components = comps;
  }
  for (const auto& v : vars)
    if (v.kind == VariableKind::ratio && v.components.empty())
      throw DataError(fmt::format("ratio variable '{}' has no [ratios] entry", v.name));

  const auto& ann = meta.annotations;
  for (const auto& [label, group] : ann.groups) {
    require_label(label, "groups");
    if (group.empty()) throw DataError(fmt::format("groups: empty group for '{}'", label));
  }
  if (ann.focal) require_label(*ann.focal, "focal");
  if (ann.reference_a) require_label(*ann.reference_a, "reference_a");
  if (ann.reference_b) require_label(*ann.reference_b, "reference_b");
  for (const auto& [set, names] : ann.variable_sets) {
    std::set<std::string_view> unique;
    for (const auto& n : names) {
      require_variable(n, "variable set '" + set + "'");
      if (!unique.insert(n).second)
        throw DataError(fmt::format("variable set '{}' lists '{}' twice", set, n));
    }
  }

  return ObservationTable(table.labels(), std::move(vars), table.cells(), ann);
}

}  // namespace czek
