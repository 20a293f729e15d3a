#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace czek::csv {

/// One parsed record plus the physical line it started on.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// RFC 4180 reader: comma separated, optional double-quote quoting with ""
/// escapes, CRLF or LF line ends, leading UTF-8 BOM dropped. Blank lines are
/// skipped. Throws ParseError on an unterminated quote.
std::vector<Record> read(std::istream& in, const std::string& source_name);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace czek::csv
