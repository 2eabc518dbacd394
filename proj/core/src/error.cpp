#include "tfld/error.hpp"

#include <fmt/format.h>

namespace tfld {

std::string Diagnostic::to_string() const {
  std::string where = sheet.empty() ? std::string("input") : sheet;
  if (row > 0) where += fmt::format(":{}", row);
  if (column > 0) where += fmt::format(":{}", column);
  return fmt::format("{}: {}", where, message);
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "invalid input";
  std::string text = diagnostics.front().to_string();
  if (diagnostics.size() > 1) text += fmt::format(" (and {} more)", diagnostics.size() - 1);
  return text;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace tfld
