#include "czek/error.hpp"

#include <fmt/format.h>

namespace czek {

namespace {

std::string locate(const std::string& source, std::size_t line, std::size_t column,
                   const std::string& message) {
  if (column == 0) return fmt::format("{}:{}: {}", source, line, message);
  return fmt::format("{}:{}:{}: {}", source, line, column, message);
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, std::size_t column,
                       const std::string& message)
    : DataError(locate(source, line, column, message)),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

}  // namespace czek
