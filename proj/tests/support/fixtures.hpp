#pragma once

#include <filesystem>
#include <string>

#include "czek/dataset.hpp"

namespace fixture {

inline std::filesystem::path dir() { return CZEK_FIXTURE_DIR; }
inline std::string table_path() { return (dir() / "skulls13.csv").string(); }
inline std::string meta_path() { return (dir() / "skulls13.meta").string(); }
inline std::string grid_path() { return (dir() / "grid96.conf").string(); }

inline const czek::ObservationTable& skulls() {
  static const czek::ObservationTable t = czek::load_table(table_path(), meta_path());
  return t;
}

inline czek::ObservationTable skulls27() {
  const auto& t = skulls();
  return czek::subset_variables(t, czek::VariableMode::all,
                                t.annotations().variable_sets.at("paper27"));
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::path(CZEK_SCRATCH_DIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixture
