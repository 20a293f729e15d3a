#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace czek::kv {

// A small INI/TOML-like format shared by the metadata sidecar and the grid
// config:
//
//   # comment
//   [section]
//   key = value
//   "key, with comma" = [item, "quoted item", 3.5]
//
// Keys and scalar values may be bare (trimmed) or double-quoted. A value
// starting with '[' is a list. Everything is kept as text; callers interpret.

struct Entry {
  std::size_t line = 0;
  std::string section;
  std::string key;
  bool is_list = false;
  std::vector<std::string> values;  // exactly one element unless is_list

  const std::string& scalar() const;  // throws ParseError when is_list
};

struct Section {
  std::size_t line = 0;
  std::string name;
};

struct Document {
  std::string source;
  std::vector<Section> sections;  // headers in file order, repeats included
  std::vector<Entry> entries;
};

Document parse(std::istream& in, const std::string& source_name);

}  // namespace czek::kv
