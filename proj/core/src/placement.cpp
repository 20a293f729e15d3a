#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "czek/error.hpp"
#include "czek/experiments.hpp"

namespace czek {

std::string_view to_string(PlacementCategory c) {
  switch (c) {
    case PlacementCategory::interior_own_group: return "interior_own_group";
    case PlacementCategory::boundary: return "boundary";
    case PlacementCategory::singleton: return "singleton";
    case PlacementCategory::grouped_with_other: return "grouped_with_other";
    case PlacementCategory::interior_other_group: return "interior_other_group";
    case PlacementCategory::mixed: return "mixed";
  }
  return "mixed";
}

std::optional<PlacementCategory> placement_category_from_string(std::string_view s) {
  for (auto c : {PlacementCategory::interior_own_group, PlacementCategory::boundary,
                 PlacementCategory::singleton, PlacementCategory::grouped_with_other,
                 PlacementCategory::interior_other_group, PlacementCategory::mixed})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

Placement classify_placement(const std::vector<std::string>& ordered_labels,
                             const std::map<std::string, std::string>& groups,
                             std::string_view focal) {
  const auto it = std::find(ordered_labels.begin(), ordered_labels.end(), focal);
  if (it == ordered_labels.end())
    throw DataError(fmt::format("focal observation '{}' is not in the order", focal));
  const std::size_t n = ordered_labels.size();
  const auto pos = static_cast<std::size_t>(it - ordered_labels.begin());

  std::vector<std::string> g;
  std::set<std::string> distinct;
  for (const auto& label : ordered_labels) {
    const auto found = groups.find(label);
    if (found == groups.end())
      throw DataError(fmt::format("observation '{}' has no group", label));
    g.push_back(found->second);
  }
  for (const auto& [label, group] : groups) distinct.insert(group);
  if (distinct.size() < 2) throw DataError("placement needs at least two groups");

  const std::string& own = g[pos];
  std::size_t lo = pos;
  std::size_t hi = pos;
  while (lo > 0 && g[lo - 1] == own) --lo;
  while (hi + 1 < n && g[hi + 1] == own) ++hi;
  const std::size_t run = hi - lo + 1;

  Placement out;
  auto& ctx = out.context;
  ctx.own_run_length = run;
  if (pos > 0) {
    ctx.left_label = ordered_labels[pos - 1];
    ctx.left_group = g[pos - 1];
  }
  if (pos + 1 < n) {
    ctx.right_label = ordered_labels[pos + 1];
    ctx.right_group = g[pos + 1];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) ctx.group_sequence += '|';
    ctx.group_sequence += k == pos ? "[" + g[k] + "]" : g[k];
  }

  const bool left_own = pos == 0 || g[pos - 1] == own;
  const bool right_own = pos + 1 == n || g[pos + 1] == own;

  if (run >= 2 && run <= 3 && lo > 0 && hi + 1 < n) {
    out.category = PlacementCategory::grouped_with_other;
  } else if (left_own && right_own) {
    out.category = PlacementCategory::interior_own_group;
  } else if (run == 1) {
    if (pos > 0 && pos + 1 < n && g[pos - 1] != g[pos + 1]) {
      out.category = PlacementCategory::mixed;
    } else {
      const std::string& other = pos > 0 ? g[pos - 1] : g[pos + 1];
      std::size_t left_count = 0;
      for (std::size_t k = pos; k > 0 && g[k - 1] == other; --k) ++left_count;
      std::size_t right_count = 0;
      for (std::size_t k = pos + 1; k < n && g[k] == other; ++k) ++right_count;
      out.category = left_count >= 2 && right_count >= 2 ? PlacementCategory::interior_other_group
                                                         : PlacementCategory::singleton;
    }
  } else {
    out.category = PlacementCategory::boundary;
  }
  return out;
}

}  // namespace czek
