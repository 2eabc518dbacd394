#pragma once
//
// The three per-round CSV sheets and their cross-validation.
//
//   Responses:    Judge, Level, then (C1, C2, C3, C4, R) once per item
//   Dimensions:   Dimension, Begin, End, J1 .. Jp
//   Descriptions: ItemId, Text
//
// Criterion cells hold integer label indices 0..n(t)-1 (or a configured alias
// word); R is a real in [0, 1]. Decimal separator is '.'.
//

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfld/delphi.hpp"
#include "tfld/linguistic.hpp"

namespace tfld {

inline constexpr std::string_view kResponsesSheet = "Responses";
inline constexpr std::string_view kDimensionsSheet = "Dimensions";
inline constexpr std::string_view kDescriptionsSheet = "Description";

struct ItemDescription {
  int item_id = 0;
  std::string text;

  friend bool operator==(const ItemDescription&, const ItemDescription&) = default;
};

// granularity -> display word -> label index. Words are matched case-insensitively.
using LabelAliases = std::map<int, std::map<std::string, int>>;

struct ResponsesSheet {
  std::vector<std::string> judge_ids;
  std::vector<int> judge_levels;
  std::vector<AssessmentMatrix> items;

  std::size_t judge_count() const noexcept { return judge_levels.size(); }
  int item_count() const noexcept { return static_cast<int>(items.size()); }
};

ResponsesSheet parse_responses(std::string_view csv, bool has_header = true,
                               const ExtendedHierarchy& elh = default_hierarchy(),
                               const LabelAliases& aliases = {});

std::vector<DimensionRange> parse_dimensions(std::string_view csv, bool has_header = true);

std::vector<ItemDescription> parse_descriptions(std::string_view csv, bool has_header = true);

std::vector<ItemDescription> placeholder_descriptions(int item_count);

// Writers emit a header row and reproduce the parsed values exactly.
std::string write_responses(const ResponsesSheet& sheet);
std::string write_dimensions(const std::vector<DimensionRange>& dimensions);
std::string write_descriptions(const std::vector<ItemDescription>& descriptions);

// Validated inputs of one round, with defaults applied for absent sheets.
struct RoundInputs {
  int round_number = 1;
  ResponsesSheet responses;
  PanelConfiguration panel;
  std::vector<ItemDescription> descriptions;
  bool dimensions_supplied = false;
  bool descriptions_supplied = false;
  std::vector<std::string> warnings;
};

// Parses each present sheet and cross-checks p and n between them. Every
// problem found is reported in a single ParseError.
RoundInputs assemble_round(int round_number, std::string_view responses,
                           std::optional<std::string_view> dimensions,
                           std::optional<std::string_view> descriptions, bool has_header = true,
                           const ExtendedHierarchy& elh = default_hierarchy());

}  // namespace tfld
