#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tfld::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> cells;
};

// Comma-delimited, RFC 4180 quoting, LF or CRLF line ends, optional UTF-8 BOM.
// Unquoted cells are trimmed of surrounding whitespace; blank lines are skipped.
// Throws ParseError (tagged with `sheet`) on an unterminated quoted field.
std::vector<Row> read(std::string_view text, std::string_view sheet);

// Quotes the cell when it contains a comma, quote, newline or edge whitespace.
std::string escape(std::string_view cell);

std::string join(const std::vector<std::string>& cells);

}  // namespace tfld::csv
