#include "tfld/session_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "tfld/csv.hpp"
#include "tfld/error.hpp"

namespace tfld {

namespace {

constexpr std::size_t kItemGroupWidth = kCriteriaCount + 1;

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e) return std::nullopt;
  return v;
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v, std::chars_format::general);
  if (ec != std::errc() || ptr != e || b == e || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Collects diagnostics for one sheet and throws them together.
class Problems {
 public:
  explicit Problems(std::string_view sheet) : sheet_(sheet) {}

  void add(std::size_t row, std::size_t column, std::string message) {
    list_.push_back(Diagnostic{sheet_, row, column, std::move(message)});
  }
  bool empty() const noexcept { return list_.empty(); }
  std::vector<Diagnostic>& list() noexcept { return list_; }
  void throw_if_any() {
    if (!list_.empty()) throw ParseError(std::move(list_));
  }

 private:
  std::string sheet_;
  std::vector<Diagnostic> list_;
};

// The expected width comes from the header when there is one, otherwise from
// the first data row.
std::vector<csv::Row> data_rows(std::string_view text, std::string_view sheet, bool has_header,
                                std::size_t* width = nullptr) {
  std::vector<csv::Row> rows = csv::read(text, sheet);
  if (width != nullptr && !rows.empty()) *width = rows.front().cells.size();
  if (has_header && !rows.empty()) rows.erase(rows.begin());
  if (rows.empty()) {
    throw ParseError({Diagnostic{std::string(sheet), 0, 0, "no data rows"}});
  }
  return rows;
}

std::string shortest(double v) { return fmt::format("{}", v); }

}  // namespace

ResponsesSheet parse_responses(std::string_view text, bool has_header, const ExtendedHierarchy& elh,
                               const LabelAliases& aliases) {
  std::size_t width = 0;
  const std::vector<csv::Row> rows = data_rows(text, kResponsesSheet, has_header, &width);
  Problems problems(kResponsesSheet);

  if (width < 2 + kItemGroupWidth || (width - 2) % kItemGroupWidth != 0) {
    problems.add(rows.front().line, 0,
                 fmt::format("expected 2 + 5n columns (Judge, Level, then C1..C4,R per item), got {}",
                             width));
    problems.throw_if_any();
  }
  const std::size_t n = (width - 2) / kItemGroupWidth;
  const std::size_t p = rows.size();

  ResponsesSheet sheet;
  sheet.judge_ids.resize(p);
  sheet.judge_levels.assign(p, 0);
  sheet.items.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    sheet.items[r].item_id = static_cast<int>(r) + 1;
    sheet.items[r].labels.assign(p, {});
    sheet.items[r].relevance.assign(p, 0.0);
  }

  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < p; ++i) {
    const csv::Row& row = rows[i];
    if (row.cells.size() != width) {
      problems.add(row.line, std::min(row.cells.size(), width) + 1,
                   fmt::format("ragged row: {} columns, expected {}", row.cells.size(), width));
      continue;
    }
    if (row.cells[0].empty()) {
      problems.add(row.line, 1, "empty judge id");
    } else if (!seen_ids.insert(row.cells[0]).second) {
      problems.add(row.line, 1, fmt::format("duplicate judge id '{}'", row.cells[0]));
    }
    sheet.judge_ids[i] = row.cells[0];

    const auto level = to_integer(row.cells[1]);
    bool level_ok = false;
    if (!level) {
      problems.add(row.line, 2, fmt::format("level '{}' is not an integer granularity", row.cells[1]));
    } else if (*level < 3 || *level % 2 == 0) {
      problems.add(row.line, 2, fmt::format("granularity {} must be odd and >= 3", *level));
    } else if (std::none_of(elh.levels().begin(), elh.levels().end(),
                            [&](const TermSetLevel& l) { return l.granularity() == *level; })) {
      problems.add(row.line, 2, fmt::format("granularity {} is not a supported term set", *level));
    } else {
      sheet.judge_levels[i] = static_cast<int>(*level);
      level_ok = true;
    }

    const std::map<std::string, int>* words = nullptr;
    if (level_ok) {
      if (auto it = aliases.find(sheet.judge_levels[i]); it != aliases.end()) words = &it->second;
    }

    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t base = 2 + r * kItemGroupWidth;
      for (std::size_t j = 0; j < kCriteriaCount; ++j) {
        const std::string& cell = row.cells[base + j];
        const std::size_t column = base + j + 1;
        std::optional<long long> label = to_integer(cell);
        if (!label && words != nullptr) {
          for (const auto& [word, index] : *words) {
            if (lower(word) == lower(cell)) label = index;
          }
        }
        if (!label) {
          problems.add(row.line, column, fmt::format("label '{}' is not a label index", cell));
          continue;
        }
        if (level_ok && (*label < 0 || *label > sheet.judge_levels[i] - 1)) {
          problems.add(row.line, column,
                       fmt::format("label index {} out of range 0..{} for S^{}", *label,
                                   sheet.judge_levels[i] - 1, sheet.judge_levels[i]));
          continue;
        }
        sheet.items[r].labels[i][j] = static_cast<int>(*label);
      }
      const std::string& rel = row.cells[base + kCriteriaCount];
      const std::size_t column = base + kCriteriaCount + 1;
      const auto value = to_real(rel);
      if (!value) {
        problems.add(row.line, column, fmt::format("relevance '{}' is not a number", rel));
      } else if (*value < 0.0 || *value > 1.0) {
        problems.add(row.line, column, fmt::format("relevance {} outside [0, 1]", *value));
      } else {
        sheet.items[r].relevance[i] = *value;
      }
    }
  }
  problems.throw_if_any();
  return sheet;
}

std::vector<DimensionRange> parse_dimensions(std::string_view text, bool has_header) {
  std::size_t width = 0;
  const std::vector<csv::Row> rows = data_rows(text, kDimensionsSheet, has_header, &width);
  Problems problems(kDimensionsSheet);

  if (width < 4) {
    problems.add(rows.front().line, 0,
                 fmt::format("expected Dimension, Begin, End and one weight per judge; got {} columns",
                             width));
    problems.throw_if_any();
  }
  const std::size_t p = width - 3;

  std::vector<DimensionRange> dims;
  std::set<std::string> seen;
  int expected_begin = 1;
  for (const csv::Row& row : rows) {
    if (row.cells.size() != width) {
      problems.add(row.line, std::min(row.cells.size(), width) + 1,
                   fmt::format("row has {} weights, expected {} (one per judge)",
                               row.cells.size() < 3 ? 0 : row.cells.size() - 3, p));
      continue;
    }
    DimensionRange d;
    d.id = row.cells[0];
    if (d.id.empty()) problems.add(row.line, 1, "empty dimension id");
    else if (!seen.insert(d.id).second) problems.add(row.line, 1, fmt::format("duplicate dimension '{}'", d.id));

    const auto begin = to_integer(row.cells[1]);
    const auto end = to_integer(row.cells[2]);
    if (!begin || *begin < 1) problems.add(row.line, 2, fmt::format("begin '{}' is not an item number", row.cells[1]));
    if (!end || *end < 1) problems.add(row.line, 3, fmt::format("end '{}' is not an item number", row.cells[2]));
    if (begin && end && *begin >= 1 && *end >= 1) {
      d.first_item = static_cast<int>(*begin);
      d.last_item = static_cast<int>(*end);
      if (d.last_item < d.first_item) {
        problems.add(row.line, 3, fmt::format("range {}..{} is empty", d.first_item, d.last_item));
      } else if (d.first_item < expected_begin) {
        problems.add(row.line, 2, fmt::format("range {}..{} overlaps the previous dimension",
                                              d.first_item, d.last_item));
      } else if (d.first_item > expected_begin) {
        problems.add(row.line, 2, fmt::format("gap: items {}..{} belong to no dimension",
                                              expected_begin, d.first_item - 1));
      }
      expected_begin = std::max(expected_begin, d.last_item + 1);
    }

    double sum = 0.0;
    bool weights_ok = true;
    for (std::size_t k = 0; k < p; ++k) {
      const auto w = to_real(row.cells[3 + k]);
      if (!w || *w < 0.0) {
        problems.add(row.line, 4 + k, fmt::format("weight '{}' is not a non-negative number",
                                                  row.cells[3 + k]));
        weights_ok = false;
        continue;
      }
      d.weights.push_back(*w);
      sum += *w;
    }
    if (weights_ok && !weight_sum_acceptable(sum)) {
      problems.add(row.line, 4, fmt::format("weights in columns 4..{} sum to {:.6g}, expected 1 within {}",
                                            3 + p, sum, kWeightSumTolerance));
    }
    dims.push_back(std::move(d));
  }
  problems.throw_if_any();
  return dims;
}

std::vector<ItemDescription> parse_descriptions(std::string_view text, bool has_header) {
  const std::vector<csv::Row> rows = data_rows(text, kDescriptionsSheet, has_header);
  Problems problems(kDescriptionsSheet);
  std::vector<ItemDescription> out;
  std::map<int, std::size_t> line_of;
  for (const csv::Row& row : rows) {
    if (row.cells.size() != 2) {
      problems.add(row.line, std::min<std::size_t>(row.cells.size(), 2) + 1,
                   fmt::format("expected ItemId,Text; got {} columns", row.cells.size()));
      continue;
    }
    const auto id = to_integer(row.cells[0]);
    if (!id || *id < 1) {
      problems.add(row.line, 1, fmt::format("item id '{}' is not a positive integer", row.cells[0]));
      continue;
    }
    if (auto [it, inserted] = line_of.emplace(static_cast<int>(*id), row.line); !inserted) {
      problems.add(row.line, 1, fmt::format("duplicate item id {} (first on line {})", *id, it->second));
      continue;
    }
    out.push_back({static_cast<int>(*id), row.cells[1]});
  }
  if (problems.empty()) {
    std::sort(out.begin(), out.end(),
              [](const ItemDescription& a, const ItemDescription& b) { return a.item_id < b.item_id; });
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].item_id != static_cast<int>(k) + 1) {
        problems.add(line_of[out[k].item_id], 1,
                     fmt::format("item ids must run 1..{} without gaps; found {}", out.size(),
                                 out[k].item_id));
        break;
      }
    }
  }
  problems.throw_if_any();
  return out;
}

std::vector<ItemDescription> placeholder_descriptions(int item_count) {
  std::vector<ItemDescription> out;
  for (int r = 1; r <= item_count; ++r) out.push_back({r, fmt::format("Item {}", r)});
  return out;
}

std::string write_responses(const ResponsesSheet& sheet) {
  std::vector<std::string> header = {"Judge", "Level"};
  for (int r = 1; r <= sheet.item_count(); ++r) {
    for (std::size_t j = 0; j < kCriteriaCount; ++j) header.push_back(fmt::format("I{}C{}", r, j + 1));
    header.push_back(fmt::format("I{}R", r));
  }
  std::string out = csv::join(header) + "\n";
  for (std::size_t i = 0; i < sheet.judge_count(); ++i) {
    std::vector<std::string> cells = {
        i < sheet.judge_ids.size() ? sheet.judge_ids[i] : fmt::format("J{}", i + 1),
        std::to_string(sheet.judge_levels[i])};
    for (const auto& item : sheet.items) {
      for (int label : item.labels[i]) cells.push_back(std::to_string(label));
      cells.push_back(shortest(item.relevance[i]));
    }
    out += csv::join(cells) + "\n";
  }
  return out;
}

std::string write_dimensions(const std::vector<DimensionRange>& dimensions) {
  const std::size_t p = dimensions.empty() ? 0 : dimensions.front().weights.size();
  std::vector<std::string> header = {"Dimension", "Begin", "End"};
  for (std::size_t k = 1; k <= p; ++k) header.push_back(fmt::format("J{}", k));
  std::string out = csv::join(header) + "\n";
  for (const auto& d : dimensions) {
    std::vector<std::string> cells = {d.id, std::to_string(d.first_item), std::to_string(d.last_item)};
    for (double w : d.weights) cells.push_back(shortest(w));
    out += csv::join(cells) + "\n";
  }
  return out;
}

std::string write_descriptions(const std::vector<ItemDescription>& descriptions) {
  std::string out = "ItemId,Text\n";
  for (const auto& d : descriptions) out += csv::join({std::to_string(d.item_id), d.text}) + "\n";
  return out;
}

RoundInputs assemble_round(int round_number, std::string_view responses,
                           std::optional<std::string_view> dimensions,
                           std::optional<std::string_view> descriptions, bool has_header,
                           const ExtendedHierarchy& elh) {
  if (round_number < 1) throw SessionConflictError("round numbers start at 1");
  std::vector<Diagnostic> all;
  auto collect = [&](auto&& parse) {
    try {
      parse();
    } catch (ParseError& e) {
      all.insert(all.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  };

  RoundInputs in;
  in.round_number = round_number;
  bool responses_ok = false;
  collect([&] {
    in.responses = parse_responses(responses, has_header, elh);
    responses_ok = true;
  });
  std::vector<DimensionRange> dims;
  bool dims_ok = false;
  if (dimensions) {
    collect([&] {
      dims = parse_dimensions(*dimensions, has_header);
      dims_ok = true;
    });
  }
  bool descs_ok = false;
  if (descriptions) {
    collect([&] {
      in.descriptions = parse_descriptions(*descriptions, has_header);
      descs_ok = true;
    });
  }

  if (responses_ok) {
    const std::size_t p = in.responses.judge_count();
    const int n = in.responses.item_count();
    if (dims_ok) {
      if (dims.front().weights.size() != p) {
        all.push_back({std::string(kDimensionsSheet), 0, 0,
                       fmt::format("dimensions declare {} judges but responses have {}",
                                   dims.front().weights.size(), p)});
      }
      if (dims.back().last_item != n) {
        all.push_back({std::string(kDimensionsSheet), 0, 0,
                       fmt::format("dimensions cover items 1..{} but responses have {} items",
                                   dims.back().last_item, n)});
      }
    }
    if (descs_ok && static_cast<int>(in.descriptions.size()) != n) {
      all.push_back({std::string(kDescriptionsSheet), 0, 0,
                     fmt::format("{} descriptions for {} items", in.descriptions.size(), n)});
    }
  }
  if (!all.empty()) throw ParseError(std::move(all));

  const int n = in.responses.item_count();
  in.dimensions_supplied = dimensions.has_value();
  in.descriptions_supplied = descriptions.has_value();
  if (in.dimensions_supplied) {
    in.panel.judge_levels = in.responses.judge_levels;
    in.panel.dimensions = std::move(dims);
  } else {
    in.panel = PanelConfiguration::uniform(in.responses.judge_levels, n);
  }
  in.panel.judge_ids = in.responses.judge_ids;
  if (!in.descriptions_supplied) in.descriptions = placeholder_descriptions(n);
  in.warnings = in.panel.validate(n, elh);
  return in;
}

}  // namespace tfld
