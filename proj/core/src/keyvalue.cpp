#include "czek/keyvalue.hpp"

#include <istream>
#include <string_view>

#include "czek/error.hpp"

namespace czek::kv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class LineParser {
 public:
  LineParser(std::string_view text, const std::string& source, std::size_t line)
      : text_(text), source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(source_, line_, pos_ + 1, message);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool at_end_or_comment() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void advance() { ++pos_; }

  std::string quoted() {
    advance();  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        ++pos_;
        const char e = text_[pos_];
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else {
        out.push_back(text_[pos_]);
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    advance();
    return out;
  }

  /// Bare token up to one of `stops` or a comment; trimmed.
  std::string bare(std::string_view stops) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && stops.find(text_[pos_]) == std::string_view::npos &&
           text_[pos_] != '#')
      ++pos_;
    return std::string(trim(text_.substr(start, pos_ - start)));
  }

  std::string token(std::string_view stops) {
    skip_space();
    if (peek() == '"') return quoted();
    return bare(stops);
  }

 private:
  std::string_view text_;
  const std::string& source_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::string& Entry::scalar() const {
  if (is_list) throw DataError("key '" + key + "' expects a single value, got a list");
  return values.front();
}

Document parse(std::istream& in, const std::string& source_name) {
  Document doc;
  doc.source = source_name;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    LineParser p(line, source_name, line_no);
    if (p.at_end_or_comment()) continue;

    if (p.peek() == '[') {
      p.advance();
      std::string name = p.token("]");
      if (p.peek() != ']') p.fail("expected ']' after section name");
      p.advance();
      if (!p.at_end_or_comment()) p.fail("unexpected text after section header");
      if (name.empty()) p.fail("empty section name");
      doc.sections.push_back({line_no, name});
      section = std::move(name);
      continue;
    }

    Entry entry;
    entry.line = line_no;
    entry.section = section;
    entry.key = p.token("=");
    if (entry.key.empty()) p.fail("missing key");
    p.skip_space();
    if (p.peek() != '=') p.fail("expected '='");
    p.advance();
    p.skip_space();

    if (p.peek() == '[') {
      entry.is_list = true;
      p.advance();
      p.skip_space();
      if (p.peek() == ']') {
        p.advance();
      } else {
        while (true) {
          entry.values.push_back(p.token(",]"));
          p.skip_space();
          if (p.peek() == ',') {
            p.advance();
            continue;
          }
          if (p.peek() == ']') {
            p.advance();
            break;
          }
          p.fail("expected ',' or ']' in list");
        }
      }
    } else {
      entry.values.push_back(p.token(""));
    }
    if (!p.at_end_or_comment()) p.fail("unexpected text after value");
    doc.entries.push_back(std::move(entry));
  }
  return doc;
}

}  // namespace czek::kv
