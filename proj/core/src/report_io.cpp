#include "tfld/report_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>

#include <fmt/format.h>

#include "tfld/csv.hpp"
#include "tfld/error.hpp"

namespace tfld {

namespace {

using nlohmann::json;

constexpr std::array<const char*, kCriteriaCount> kCollectiveNames = {"CC", "CW", "CP", "CAS"};
constexpr std::array<const char*, kCriteriaCount> kCriterionKeys = {"clarity", "writing", "presence",
                                                                    "answering_scale"};

std::string fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

const char* boolean(bool b) { return b ? "true" : "false"; }

std::string description_for(std::span<const ItemDescription> descriptions, int item_id) {
  for (const auto& d : descriptions) {
    if (d.item_id == item_id) return d.text;
  }
  return {};
}

std::string export_csv(const RoundReport& report) {
  std::string out = "item_id,is_label,is_alpha,ci,cs,ri,rs,relevance\n";
  for (const auto& it : report.items) {
    out += fmt::format("{},s{},{},{},{},{},{},{}\n", it.item_id, it.item_score.label_index(),
                       fixed(it.item_score.alpha(), 3), fixed(it.consensus_index, 3),
                       boolean(it.consensus_status), fixed(it.reliance_index, 2),
                       boolean(it.reliance_status), fixed(it.relevance_collective, 3));
  }
  out += "\ncollective,label,alpha\n";
  for (std::size_t j = 0; j < report.criterion_collectives.size(); ++j) {
    const TwoTuple& c = report.criterion_collectives[j];
    out += fmt::format("{},s{},{}\n", kCollectiveNames[j], c.label_index(), fixed(c.alpha(), 3));
  }
  out += fmt::format("QS,s{},{}\n", report.questionnaire_score.label_index(),
                     fixed(report.questionnaire_score.alpha(), 3));
  return out;
}

std::string export_text(const RoundReport& report, std::span<const ItemDescription> descriptions) {
  std::string out = fmt::format("Round {}  epsilon={}  consensus>={}\n\n", report.round_number,
                                fixed(report.epsilon, 2), fixed(report.consensus_threshold, 2));
  out += fmt::format("{:>5}  {:<14} {:>6}  {:<5}  {:>4}  {:<5}  {:>5}", "Item", "IS", "CI", "CS",
                     "RI", "RS", "W");
  const bool with_text = !descriptions.empty();
  if (with_text) out += "  Description";
  out += "\n";
  for (const auto& it : report.items) {
    out += fmt::format("{:>5}  {:<14} {:>6}  {:<5}  {:>4}  {:<5}  {:>5}", it.item_id,
                       format_two_tuple(it.item_score), fixed(it.consensus_index, 3),
                       boolean(it.consensus_status), fixed(it.reliance_index, 2),
                       boolean(it.reliance_status), fixed(it.relevance_collective, 3));
    if (with_text) out += "  " + description_for(descriptions, it.item_id);
    out += "\n";
  }
  out += "\n";
  for (std::size_t j = 0; j < report.criterion_collectives.size(); ++j) {
    out += fmt::format("{:<4} {}\n", kCollectiveNames[j],
                       format_two_tuple(report.criterion_collectives[j]));
  }
  out += fmt::format("{:<4} {}\n", "QS", format_two_tuple(report.questionnaire_score));
  return out;
}

std::optional<double> real(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<int> label_cell(const std::string& s) {
  if (s.size() < 2 || s[0] != 's') return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "text" || name == "plain" || name == "plain-text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  throw ParameterError(fmt::format("unknown report format '{}'", name));
}

std::string export_report(const RoundReport& report, ReportFormat format,
                          std::span<const ItemDescription> descriptions) {
  switch (format) {
    case ReportFormat::Csv:
      return export_csv(report);
    case ReportFormat::Text:
      return export_text(report, descriptions);
    case ReportFormat::Json:
      return to_json(report, descriptions).dump(2) + "\n";
  }
  return {};
}

ExportedReport parse_report_csv(std::string_view text) {
  const auto rows = csv::read(text, "Report");
  ExportedReport out;
  std::vector<Diagnostic> problems;
  auto bad = [&](const csv::Row& row, std::size_t col, std::string msg) {
    problems.push_back({"Report", row.line, col, std::move(msg)});
  };
  bool in_footer = false;
  for (const auto& row : rows) {
    if (row.cells.empty()) continue;
    if (row.cells[0] == "item_id") continue;
    if (row.cells[0] == "collective") {
      in_footer = true;
      continue;
    }
    if (!in_footer) {
      if (row.cells.size() != 8) {
        bad(row, 0, "expected 8 columns");
        continue;
      }
      ExportedItem e;
      const auto id = real(row.cells[0]);
      const auto label = label_cell(row.cells[1]);
      const auto alpha = real(row.cells[2]);
      const auto ci = real(row.cells[3]);
      const auto ri = real(row.cells[5]);
      const auto w = real(row.cells[7]);
      if (!id || !label || !alpha || !ci || !ri || !w) {
        bad(row, 0, "malformed report row");
        continue;
      }
      e.item_id = static_cast<int>(*id);
      e.label = *label;
      e.alpha = *alpha;
      e.consensus_index = *ci;
      e.consensus_status = row.cells[4] == "true";
      e.reliance_index = *ri;
      e.reliance_status = row.cells[6] == "true";
      e.relevance = *w;
      out.items.push_back(e);
    } else {
      const auto label = row.cells.size() == 3 ? label_cell(row.cells[1]) : std::nullopt;
      const auto alpha = row.cells.size() == 3 ? real(row.cells[2]) : std::nullopt;
      if (!label || !alpha) {
        bad(row, 0, "malformed collective row");
        continue;
      }
      out.collectives.push_back({row.cells[0], *label, *alpha});
    }
  }
  if (!problems.empty()) throw ParseError(std::move(problems));
  return out;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const TwoTuple& v) {
  return json{{"label_index", v.label_index()},
              {"alpha", v.alpha()},
              {"level_granularity", v.granularity()},
              {"beta", v.beta()},
              {"display", format_two_tuple(v)}};
}

TwoTuple two_tuple_from_json(const json& j) {
  return TwoTuple(j.at("label_index").get<int>(), j.at("alpha").get<double>(),
                  j.at("level_granularity").get<int>());
}

json to_json(const ItemResult& it) {
  json criteria = json::array();
  for (const auto& y : it.criterion_collectives) criteria.push_back(to_json(y));
  return json{{"item_id", it.item_id},
              {"criterion_collectives", std::move(criteria)},
              {"relevance", it.relevance_collective},
              {"overall", to_json(it.overall)},
              {"item_score", to_json(it.item_score)},
              {"separations", it.separations},
              {"consensus_index", it.consensus_index},
              {"raw_consensus_index", it.raw_consensus_index},
              {"consensus_status", it.consensus_status},
              {"reliance_index", it.reliance_index},
              {"reliance_status", it.reliance_status}};
}

ItemResult item_result_from_json(const json& j) {
  ItemResult it;
  it.item_id = j.at("item_id").get<int>();
  for (const auto& y : j.at("criterion_collectives")) {
    it.criterion_collectives.push_back(two_tuple_from_json(y));
  }
  it.relevance_collective = j.at("relevance").get<double>();
  it.overall = two_tuple_from_json(j.at("overall"));
  it.item_score = two_tuple_from_json(j.at("item_score"));
  it.separations = j.at("separations").get<std::vector<double>>();
  it.consensus_index = j.at("consensus_index").get<double>();
  it.raw_consensus_index = j.at("raw_consensus_index").get<double>();
  it.consensus_status = j.at("consensus_status").get<bool>();
  it.reliance_index = j.at("reliance_index").get<double>();
  it.reliance_status = j.at("reliance_status").get<bool>();
  return it;
}

json to_json(const RoundReport& report, std::span<const ItemDescription> descriptions) {
  json items = json::array();
  std::size_t consensual = 0;
  std::size_t reliable = 0;
  for (const auto& it : report.items) {
    json j = to_json(it);
    if (!descriptions.empty()) j["description"] = description_for(descriptions, it.item_id);
    items.push_back(std::move(j));
    consensual += it.consensus_status ? 1 : 0;
    reliable += it.reliance_status ? 1 : 0;
  }
  json collectives = json::object();
  for (std::size_t j = 0; j < report.criterion_collectives.size(); ++j) {
    collectives[kCriterionKeys[j]] = to_json(report.criterion_collectives[j]);
  }
  return json{{"round", report.round_number},
              {"epsilon", report.epsilon},
              {"consensus_threshold", report.consensus_threshold},
              {"item_count", report.items.size()},
              {"items", std::move(items)},
              {"collectives", std::move(collectives)},
              {"questionnaire_score", to_json(report.questionnaire_score)},
              {"average_relevance", report.average_relevance()},
              {"consensual_items", consensual},
              {"reliable_items", reliable}};
}

RoundReport round_report_from_json(const json& j) {
  RoundReport r;
  r.round_number = j.at("round").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.consensus_threshold = j.at("consensus_threshold").get<double>();
  for (const auto& it : j.at("items")) r.items.push_back(item_result_from_json(it));
  for (const char* key : kCriterionKeys) {
    r.criterion_collectives.push_back(two_tuple_from_json(j.at("collectives").at(key)));
  }
  r.questionnaire_score = two_tuple_from_json(j.at("questionnaire_score"));
  return r;
}

json to_json(const RoundComparison& cmp) {
  json items = json::array();
  for (const auto& d : cmp.items) {
    items.push_back(json{{"item_id", d.item_id},
                         {"item_score_delta", d.item_score_delta},
                         {"consensus_delta", d.consensus_delta},
                         {"reliance_delta", d.reliance_delta},
                         {"relevance_delta", d.relevance_delta},
                         {"consensus_before", d.consensus_before},
                         {"consensus_after", d.consensus_after},
                         {"reliance_before", d.reliance_before},
                         {"reliance_after", d.reliance_after},
                         {"regressed", d.regressed}});
  }
  json criteria = json::object();
  for (std::size_t j = 0; j < cmp.criterion_deltas.size(); ++j) {
    criteria[kCriterionKeys[j]] = cmp.criterion_deltas[j];
  }
  return json{{"round_a", cmp.round_a},
              {"round_b", cmp.round_b},
              {"items", std::move(items)},
              {"collective_deltas", std::move(criteria)},
              {"questionnaire_score_delta", cmp.questionnaire_score_delta},
              {"regressed_count", cmp.regressed_count}};
}

json to_json(const TrimResult& t, int threshold) {
  return json{{"threshold", fmt::format("s{}", threshold)},
              {"retained", t.retained},
              {"hidden", t.hidden},
              {"hidden_count", t.hidden_count()}};
}

json to_json(const std::vector<SweepPoint>& sweep) {
  json out = json::array();
  for (const auto& p : sweep) {
    out.push_back(json{{"epsilon", p.epsilon},
                       {"reliable_items", p.reliable_items},
                       {"consensual_items", p.consensual_items},
                       {"item_count", p.item_count}});
  }
  return out;
}

}  // namespace tfld
