#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfld/delphi.hpp"
#include "tfld/session_io.hpp"

namespace tfld {

enum class ReportFormat { Csv, Text, Json };

// Accepts "csv", "text" (or "plain"/"plain-text"), "json".
ReportFormat parse_report_format(std::string_view name);

// CSV: item_id,is_label,is_alpha,ci,cs,ri,rs,relevance rows, a blank line,
// then a collective,label,alpha block for CC, CW, CP, CAS and QS.
// Text: aligned table with 2-tuples rendered as "(s5, -0.369)".
// Json: the same document the HTTP API serves.
std::string export_report(const RoundReport& report, ReportFormat format,
                          std::span<const ItemDescription> descriptions = {});

struct ExportedItem {
  int item_id = 0;
  int label = 0;
  double alpha = 0.0;
  double consensus_index = 0.0;
  bool consensus_status = false;
  double reliance_index = 0.0;
  bool reliance_status = false;
  double relevance = 0.0;

  double beta() const noexcept { return label + alpha; }
};

struct ExportedCollective {
  std::string name;
  int label = 0;
  double alpha = 0.0;

  double beta() const noexcept { return label + alpha; }
};

struct ExportedReport {
  std::vector<ExportedItem> items;
  std::vector<ExportedCollective> collectives;
};

// Reads back a CSV produced by export_report.
ExportedReport parse_report_csv(std::string_view csv);

// --- JSON (shared by the CLI and the HTTP API) ---------------------------

nlohmann::json to_json(const TwoTuple& value);
TwoTuple two_tuple_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ItemResult& item);
ItemResult item_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RoundReport& report, std::span<const ItemDescription> descriptions = {});
RoundReport round_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RoundComparison& comparison);
nlohmann::json to_json(const TrimResult& trim, int threshold);
nlohmann::json to_json(const std::vector<SweepPoint>& sweep);

}  // namespace tfld
