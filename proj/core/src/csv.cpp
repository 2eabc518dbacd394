#include "tfld/csv.hpp"

#include "tfld/error.hpp"

namespace tfld::csv {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string trim(std::string s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool blank(const std::vector<std::string>& cells) {
  for (const auto& c : cells) {
    if (!c.empty()) return false;
  }
  return true;
}

}  // namespace

std::vector<Row> read(std::string_view text, std::string_view sheet) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<Row> rows;
  Row current;
  std::string cell;
  bool quoted = false;      // inside a quoted section
  bool was_quoted = false;  // current cell had quotes; keep its whitespace
  std::size_t line = 1;
  current.line = 1;

  auto finish_cell = [&] {
    current.cells.push_back(was_quoted ? cell : trim(cell));
    cell.clear();
    was_quoted = false;
  };
  auto finish_row = [&] {
    finish_cell();
    if (!blank(current.cells)) rows.push_back(std::move(current));
    current = Row{};
    current.line = line;
  };

  std::size_t quote_line = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!was_quoted) cell.clear();  // drop whitespace before the opening quote
        quoted = true;
        was_quoted = true;
        quote_line = line;
        break;
      case ',':
        finish_cell();
        break;
      case '\n':
        ++line;
        finish_row();
        break;
      default:
        if (!(was_quoted && is_space(c))) cell.push_back(c);
        break;
    }
  }
  if (quoted) {
    throw ParseError({Diagnostic{std::string(sheet), quote_line, 0, "unterminated quoted field"}});
  }
  if (!cell.empty() || was_quoted || !current.cells.empty()) finish_row();
  return rows;
}

std::string escape(std::string_view cell) {
  bool needs = !cell.empty() && (is_space(cell.front()) || is_space(cell.back()));
  for (char c : cell) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') needs = true;
  }
  if (!needs) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(cells[i]);
  }
  return out;
}

}  // namespace tfld::csv
