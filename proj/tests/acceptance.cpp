// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Every tolerance used below is a named constant in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rational_oracle.hpp"
#include "support.hpp"
#include "tfld/delphi.hpp"
#include "tfld/error.hpp"
#include "tfld/linguistic.hpp"
#include "tfld/report_io.hpp"
#include "tfld/service.hpp"
#include "tfld/session_io.hpp"
#include "tfld/session_store.hpp"

using namespace tfld;
using nlohmann::json;

namespace {

// Example 2
constexpr double kExample2Tolerance = 1e-9;
// Case study round 1
constexpr double kRound1TupleTolerance = 0.005;
constexpr double kRound1RhoTolerance = 0.01;
constexpr double kRound1CiTolerance = 0.005;
constexpr double kRound1RelevanceTolerance = 0.002;
// Case study round 2
constexpr double kRound2ScoreTolerance = 0.01;
constexpr double kRound2CiTolerance = 0.005;
constexpr double kCaseStudySeconds = 1.0;
// Property substitute
constexpr int kOraclePanels = 1000;
constexpr double kOracleTolerance = 1e-9;
constexpr double kOracleSeconds = 10.0;
constexpr int kInvariantCases = 500;
constexpr double kBetaGridStep = 1e-3;
// Session io
constexpr double kExportBetaTolerance = 0.0005;  // 3 decimals

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failure_.empty()) failure_ = what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol, fmt::format("{}: got {:.6f}, want {} +- {}", what, got, want, tol));
  }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }
  int count() const { return count_; }

 private:
  std::string failure_;
  int count_ = 0;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome finish(const Check& c, const std::string& summary) {
  return {c.ok(), c.ok() ? fmt::format("{} ({} checks)", summary, c.count()) : c.failure()};
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---------------------------------------------------------------------------

Outcome example1_unification() {
  Check c;
  const auto& star = default_hierarchy().star_level();
  c.expect(star.granularity() == 13, "unification level is not S13");
  c.expect(transform(TwoTuple(1, 0.0, 3), star) == TwoTuple(6, 0.0, 13), "(s1 of S3) -> (s6 of S13)");
  c.expect(transform(TwoTuple(3, 0.0, 5), star) == TwoTuple(9, 0.0, 13), "(s3 of S5) -> (s9 of S13)");
  c.expect(transform(TwoTuple(4, 0.0, 7), star) == TwoTuple(8, 0.0, 13), "(s4 of S7) -> (s8 of S13)");
  return finish(c, "S3/S5/S7 labels land on s6, s9, s8 of S13 with alpha 0");
}

Outcome example2() {
  Check c;
  const std::vector<TwoTuple> x = {TwoTuple(6, 0.0, 13), TwoTuple(9, 0.0, 13), TwoTuple(8, 0.0, 13)};
  const std::vector<double> v = {0.2, 0.6, 0.2};
  const TwoTuple y = weighted_extended_mean(x, v);
  c.expect(y.label_index() == 8, "collective label is not s8");
  c.near(y.alpha(), 0.2, kExample2Tolerance, "collective alpha");
  StarGrid grid;
  for (const auto& t : x) grid.push_back({t});
  const std::vector<TwoTuple> collective = {y};
  const auto rho = separations(grid, collective);
  const double want_rho[] = {2.2, 0.8, 0.2};
  for (std::size_t i = 0; i < 3; ++i) c.near(rho[i], want_rho[i], kExample2Tolerance, fmt::format("rho{}", i + 1));
  const auto ci = consensus(rho, v, default_hierarchy().star_level().max_index());
  c.near(ci.index, 0.92, kExample2Tolerance, "CI");
  const auto at06 = reliance(collective, 0.6);
  const auto at08 = reliance(collective, 0.8);
  c.expect(at06.index == 1.0 && at06.status, "RI(0.6) = 1, RS true");
  c.expect(at08.index == 0.0 && !at08.status, "RI(0.8) = 0, RS false");
  return finish(c, fmt::format("Y={} rho=({:.3f}, {:.3f}, {:.3f}) CI={:.4f}", format_two_tuple(y), rho[0], rho[1],
                               rho[2], ci.index));
}

SessionStore case_study() { return SessionStore::open(tfld::test::fixture_dir() / "i27"); }

Outcome case_study_round1() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const SessionStore store = case_study();
  EvaluationOptions options;
  options.epsilon = 0.75;
  const auto report = store.report(1, options);
  const ItemResult& r = report->item(1);
  const double y[] = {10.879, 7.255, 10.930, 7.987};
  for (std::size_t j = 0; j < kCriteriaCount; ++j) {
    c.near(r.criterion_collectives[j].beta(), y[j], kRound1TupleTolerance, fmt::format("Y{}", j + 1));
  }
  c.expect(r.overall.label_index() == 9, "Z label");
  c.near(r.overall.alpha(), 0.263, kRound1TupleTolerance, "Z alpha");
  c.expect(r.item_score.label_index() == 5, "IS label");
  c.near(r.item_score.alpha(), -0.369, kRound1TupleTolerance, "IS alpha");
  const double rho[] = {7.680, 6.405, 4.481, 6.367, 5.861, 6.405, 1.994, 6.091, 9.182};
  c.expect(r.separations.size() == 9, "nine separations");
  for (std::size_t i = 0; i < std::min<std::size_t>(9, r.separations.size()); ++i) {
    c.near(r.separations[i], rho[i], kRound1RhoTolerance, fmt::format("rho{}", i + 1));
  }
  c.near(r.consensus_index, 0.493, kRound1CiTolerance, "CI");
  c.near(r.relevance_collective, 0.987, kRound1RelevanceTolerance, "W");
  c.expect(r.reliance_index == 0.5, "RI = 0.5");
  c.expect(!r.consensus_status, "CS false");
  c.expect(!r.reliance_status, "RS false");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < kCaseStudySeconds, fmt::format("runtime {:.3f}s", elapsed));
  return finish(c, fmt::format("IS={} Z={} CI={:.5f} W={:.5f} RI={} in {:.1f} ms", format_two_tuple(r.item_score),
                               format_two_tuple(r.overall), r.consensus_index, r.relevance_collective,
                               r.reliance_index, elapsed * 1e3));
}

Outcome case_study_round2() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const SessionStore store = case_study();
  EvaluationOptions options;
  options.epsilon = 0.75;
  const auto report = store.report(2, options);
  const ItemResult& r = report->item(1);
  c.expect(r.item_score.label_index() == 6, "IS label");
  c.near(r.item_score.alpha(), -0.107, kRound2ScoreTolerance, "IS alpha");
  c.near(r.consensus_index, 0.908, kRound2CiTolerance, "CI");
  c.expect(r.reliance_index == 1.0, "RI = 1");
  c.expect(r.consensus_status, "CS true");
  c.expect(r.reliance_status, "RS true");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < kCaseStudySeconds, fmt::format("runtime {:.3f}s", elapsed));
  return finish(c, fmt::format("IS={} CI={:.5f} RI={} in {:.1f} ms", format_two_tuple(r.item_score),
                               r.consensus_index, r.reliance_index, elapsed * 1e3));
}

// ---------------------------------------------------------------------------

bool near_half(double beta) { return std::abs(beta - std::floor(beta) - 0.5) < kOracleTolerance; }

void oracle_tuple(Check& c, const TwoTuple& got, const tfld::test::Rational& want, const std::string& what) {
  const double w = tfld::test::to_double(want);
  c.near(got.beta(), w, kOracleTolerance, what);
  if (!near_half(w)) c.expect(got.label_index() == static_cast<int>(std::floor(w + 0.5)), what + " label");
}

void oracle_equivalence(Check& c, double& elapsed) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> percent(0, 100);
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < kOraclePanels; ++k) {
    const auto r = tfld::test::random_round(rng, 3, 9, 1, 10);
    const double eps = percent(rng) / 100.0;
    const auto report = evaluate_round(r.matrices, r.panel, default_hierarchy(), {eps, 0.5});
    const auto want = tfld::test::oracle_round(r.matrices, r.panel, eps);
    const std::string at = fmt::format("panel {}", k);
    for (std::size_t i = 0; i < report.items.size(); ++i) {
      const auto& g = report.items[i];
      const auto& o = want.items[i];
      for (std::size_t j = 0; j < kCriteriaCount; ++j) oracle_tuple(c, g.criterion_collectives[j], o.collectives[j], at + " Y");
      c.near(g.relevance_collective, tfld::test::to_double(o.relevance), kOracleTolerance, at + " W");
      oracle_tuple(c, g.overall, o.overall, at + " Z");
      oracle_tuple(c, g.item_score, o.item_score, at + " IS");
      for (std::size_t s = 0; s < g.separations.size(); ++s) {
        c.near(g.separations[s], o.separations[s], kOracleTolerance, at + " rho");
      }
      c.near(g.raw_consensus_index, o.consensus_index, kOracleTolerance, at + " CI");
      bool on_bar = false;
      for (const auto& y : o.collectives) {
        on_bar = on_bar || std::abs(tfld::test::to_double(y) - want.star_max * eps) < kOracleTolerance;
      }
      if (!on_bar) {
        c.near(g.reliance_index, tfld::test::to_double(o.reliance_index), kOracleTolerance, at + " RI");
        c.expect(g.reliance_status == o.reliance_status, at + " RS");
      }
    }
    for (std::size_t j = 0; j < kCriteriaCount; ++j) {
      oracle_tuple(c, report.criterion_collectives[j], want.criterion_collectives[j], at + " collective");
    }
    oracle_tuple(c, report.questionnaire_score, want.questionnaire_score, at + " QS");
  }
  elapsed = seconds_since(start);
  c.expect(elapsed < kOracleSeconds, fmt::format("oracle runtime {:.2f}s", elapsed));
}

void invariants(Check& c) {
  const int grid_steps = static_cast<int>(std::lround(1.0 / kBetaGridStep));
  for (int g : {3, 5, 7, 13}) {
    for (int k = 0; k <= (g - 1) * grid_steps; ++k) {
      const double beta = k * kBetaGridStep;
      if (delta_inv(delta(beta, g)) != beta) {
        c.expect(false, fmt::format("delta round trip at beta {} on S{}", beta, g));
        return;
      }
    }
  }
  c.expect(true, "delta round trip");

  for (int src : {3, 5, 7}) {
    for (int dst : {3, 5, 7, 13}) {
      if ((dst - 1) % (src - 1) != 0) continue;
      for (int i = 0; i < src; ++i) {
        const TwoTuple up = transform(TwoTuple(i, 0.0, src), dst);
        c.expect(up.alpha() == 0.0 && transform(up, src) == TwoTuple(i, 0.0, src),
                 fmt::format("transform exactness s{} S{} -> S{}", i, src, dst));
      }
    }
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> epsilons(101);
  for (int k = 0; k <= 100; ++k) epsilons[k] = k / 100.0;
  for (int k = 0; k < kInvariantCases; ++k) {
    const auto r = tfld::test::random_round(rng);
    const auto points = epsilon_sweep(r.matrices, r.panel, default_hierarchy(), epsilons);
    for (std::size_t e = 1; e < points.size(); ++e) {
      c.expect(points[e].reliable_items <= points[e - 1].reliable_items, "RS count non-increasing in epsilon");
    }
    const auto report = evaluate_round(r.matrices, r.panel, default_hierarchy());
    std::vector<int> previous;
    for (int t = 0; t <= 6; ++t) {
      auto hidden = trim(report, t).hidden;
      std::sort(hidden.begin(), hidden.end());
      c.expect(std::includes(hidden.begin(), hidden.end(), previous.begin(), previous.end()), "trim monotone");
      c.expect(hidden.size() + trim(report, t).retained.size() == report.items.size(), "trim partition");
      previous = std::move(hidden);
    }
  }

  std::uniform_int_distribution<int> count(1, 12);
  for (int k = 0; k < kInvariantCases; ++k) {
    const int n = count(rng);
    std::vector<TwoTuple> values;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i) {
      values.push_back(delta(unit(rng) * 12.0, 13));
      weights.push_back(0.01 + unit(rng));
    }
    const double mean = weighted_extended_mean(values, weights).beta();
    double lo = 12.0;
    double hi = 0.0;
    for (const auto& v : values) {
      lo = std::min(lo, v.beta());
      hi = std::max(hi, v.beta());
    }
    c.expect(mean >= lo && mean <= hi, "weighted mean within bounds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<TwoTuple> pv;
    std::vector<double> pw;
    for (auto i : order) {
      pv.push_back(values[i]);
      pw.push_back(weights[i]);
    }
    c.expect(std::abs(weighted_extended_mean(pv, pw).beta() - mean) < 1e-12, "weighted mean permutation");
    c.expect(weighted_extended_mean(std::vector<TwoTuple>(n, values[0]), weights) == values[0],
             "weighted mean idempotence");
  }
}

Outcome property_substitute() {
  Check c;
  double elapsed = 0.0;
  oracle_equivalence(c, elapsed);
  invariants(c);
  return finish(c, fmt::format("{} random panels match the exact-rational oracle in {:.2f}s; invariants hold over {} cases",
                               kOraclePanels, elapsed, kInvariantCases));
}

// ---------------------------------------------------------------------------

struct Row {
  const char* judge;
  int level;
  std::array<int, 4> labels;
  double relevance;
};

constexpr Row kRound1[] = {
    {"J1", 3, {2, 0, 2, 1}, 1.00}, {"J2", 3, {2, 2, 2, 2}, 1.00}, {"J3", 3, {2, 1, 2, 2}, 1.00},
    {"J4", 7, {5, 6, 6, 6}, 1.00}, {"J5", 7, {4, 3, 4, 2}, 0.90}, {"J6", 7, {6, 6, 6, 6}, 1.00},
    {"J7", 7, {6, 3, 6, 4}, 1.00}, {"J8", 7, {4, 4, 3, 3}, 1.00}, {"J9", 5, {4, 1, 4, 0}, 0.99},
};

constexpr Row kRound2[] = {
    {"J1", 7, {6, 6, 6, 6}, 1.00}, {"J2", 7, {6, 4, 6, 6}, 1.00}, {"J3", 7, {6, 6, 6, 6}, 1.00},
    {"J4", 7, {6, 6, 6, 6}, 1.00}, {"J5", 7, {6, 6, 6, 6}, 0.99}, {"J6", 7, {6, 6, 5, 6}, 1.00},
    {"J7", 7, {6, 6, 6, 6}, 1.00}, {"J8", 7, {6, 6, 6, 6}, 1.00}, {"J9", 7, {6, 6, 6, 5}, 0.90},
};

constexpr double kD4Weights[] = {0.121, 0.096, 0.089, 0.127, 0.115, 0.127, 0.115, 0.102, 0.108};

void check_tables(Check& c, int round, const Row (&rows)[9], const char* text) {
  const std::string n = std::to_string(round);
  const RoundInputs in = assemble_round(round, tfld::test::fixture("i27/Round" + n + "Responses.csv"),
                                        tfld::test::fixture("i27/Round" + n + "Dimensions.csv"),
                                        tfld::test::fixture("i27/Round" + n + "Description.csv"));
  const std::string at = "round " + n + " ";
  c.expect(in.responses.judge_count() == 9 && in.responses.item_count() == 1, at + "shape");
  for (std::size_t i = 0; i < 9 && i < in.responses.judge_count(); ++i) {
    c.expect(in.responses.judge_ids[i] == rows[i].judge, at + "judge id");
    c.expect(in.responses.judge_levels[i] == rows[i].level, at + "judge level");
    c.expect(in.responses.items[0].labels[i] == rows[i].labels, at + "labels of " + rows[i].judge);
    c.expect(in.responses.items[0].relevance[i] == rows[i].relevance, at + "relevance of " + rows[i].judge);
  }
  c.expect(in.panel.dimensions.size() == 1, at + "one dimension");
  if (!in.panel.dimensions.empty()) {
    const auto& d = in.panel.dimensions[0];
    c.expect(d.id == "D4" && d.first_item == 1 && d.last_item == 1, at + "dimension range");
    c.expect(std::equal(d.weights.begin(), d.weights.end(), std::begin(kD4Weights), std::end(kD4Weights)),
             at + "dimension weights");
  }
  c.expect(in.descriptions.size() == 1 && in.descriptions[0].item_id == 1 && in.descriptions[0].text == text,
           at + "description");
}

void check_export(Check& c, int round) {
  const SessionStore store = case_study();
  const auto report = store.report(round);
  const ExportedReport back = parse_report_csv(export_report(*report, ReportFormat::Csv));
  c.expect(back.items.size() == report->items.size(), "exported item count");
  for (std::size_t i = 0; i < back.items.size(); ++i) {
    const auto& it = report->items[i];
    c.expect(std::abs(back.items[i].beta() - it.item_score.beta()) <= kExportBetaTolerance, "exported IS beta");
    c.expect(std::abs(back.items[i].consensus_index - it.consensus_index) <= kExportBetaTolerance, "exported CI");
    c.expect(back.items[i].consensus_status == it.consensus_status, "exported CS");
    c.expect(back.items[i].reliance_status == it.reliance_status, "exported RS");
  }
  c.expect(back.collectives.size() == kCriteriaCount + 1, "exported collectives");
  for (std::size_t j = 0; j < kCriteriaCount && j < back.collectives.size(); ++j) {
    c.expect(std::abs(back.collectives[j].beta() - report->criterion_collectives[j].beta()) <= kExportBetaTolerance,
             "exported " + back.collectives[j].name);
  }
  if (back.collectives.size() == kCriteriaCount + 1) {
    c.expect(std::abs(back.collectives.back().beta() - report->questionnaire_score.beta()) <= kExportBetaTolerance,
             "exported QS");
  }
}

void check_malformed(Check& c, const std::string& file, bool dimensions, std::size_t row, std::size_t column) {
  const std::string text = tfld::test::fixture("malformed/" + file);
  try {
    if (dimensions) {
      parse_dimensions(text);
    } else {
      parse_responses(text);
    }
    c.expect(false, file + " was accepted");
  } catch (const ParseError& e) {
    const auto& d = e.diagnostics();
    const bool located = !d.empty() && d[0].row == row && d[0].column == column;
    c.expect(located, fmt::format("{}: expected row {} column {}, got {}", file, row, column,
                                  d.empty() ? std::string("nothing") : d[0].to_string()));
  }
}

Outcome session_io_fixtures() {
  Check c;
  check_tables(c, 1, kRound1,
               "Considero que he alcanzado los objetivos del curso. Escala a utilizar: Tipo B");
  check_tables(c, 2, kRound2,
               "Estoy satisfecho respecto al logro de los objetivos del curso. Escala a utilizar: Tipo B");
  check_export(c, 1);
  check_export(c, 2);
  check_malformed(c, "bad_granularity.csv", false, 3, 2);
  check_malformed(c, "label_out_of_range.csv", false, 3, 4);
  check_malformed(c, "ragged_row.csv", false, 3, 6);
  check_malformed(c, "weight_sum.csv", true, 2, 4);
  return finish(c, "tables exact, export round trip to 3 decimals, 4 malformed sheets located");
}

// ---------------------------------------------------------------------------

// Compares two JSON documents; numbers must be bit-identical.
void same_document(Check& c, const json& a, const json& b, const std::string& path, int& numbers) {
  if (a.is_number() && b.is_number()) {
    ++numbers;
    c.expect(a.get<double>() == b.get<double>(), fmt::format("{}: {} vs {}", path, a.dump(), b.dump()));
    return;
  }
  if (a.type() != b.type()) {
    c.expect(false, path + ": type differs");
    return;
  }
  if (a.is_object()) {
    c.expect(a.size() == b.size(), path + ": key sets differ");
    for (const auto& [key, value] : a.items()) {
      if (!b.contains(key)) {
        c.expect(false, path + "." + key + " missing");
        continue;
      }
      same_document(c, value, b.at(key), path + "." + key, numbers);
    }
  } else if (a.is_array()) {
    c.expect(a.size() == b.size(), path + ": lengths differ");
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      same_document(c, a[i], b[i], fmt::format("{}[{}]", path, i), numbers);
    }
  } else {
    c.expect(a == b, path + ": values differ");
  }
}

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

Outcome cli_service_parity() {
  Check c;
  tfld::test::TempDir tmp;
  Service service(tmp.path());
  httplib::Server server;
  service.register_routes(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  int numbers = 0;
  std::string id;
  if (auto res = client.Post("/api/sessions"); res && res->status == 201) {
    id = json::parse(res->body).at("session_id").get<std::string>();
  }
  c.expect(!id.empty(), "session creation");
  for (int round = 1; round <= 2 && !id.empty(); ++round) {
    const std::string n = std::to_string(round);
    for (const char* sheet : {"Responses", "Dimensions", "Description"}) {
      std::string kind = sheet;
      std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char ch) { return std::tolower(ch); });
      auto res = client.Post(fmt::format("/api/sessions/{}/rounds/{}/{}", id, round, kind),
                             tfld::test::fixture("i27/Round" + n + sheet + ".csv"), "text/csv");
      c.expect(res && res->status == 201, "upload " + kind);
    }
  }

  const auto session_dir = tmp.path() / id;
  const std::string cli = quote(tfld::test::cli_path());
  for (int round = 1; round <= 2 && !id.empty(); ++round) {
    for (double eps : {0.6, 0.75, 0.8}) {
      auto res = client.Get(fmt::format("/api/sessions/{}/rounds/{}/report?epsilon={}", id, round, eps));
      c.expect(res && res->status == 200, "GET report");
      if (!res || res->status != 200) continue;
      const auto out = tfld::test::run(fmt::format("{} evaluate --session {} --round {} --epsilon {} --format json",
                                                   cli, quote(session_dir), round, eps));
      c.expect(out.exit_code == 0, "cli evaluate exit code");
      if (out.exit_code != 0) continue;
      same_document(c, json::parse(out.out), json::parse(res->body), fmt::format("round{}@{}", round, eps), numbers);
    }
  }
  server.stop();
  thread.join();

  for (const char* format : {"text", "csv", "json"}) {
    const std::string cmd = fmt::format("{} evaluate --session {} --round 1 --format {}", cli,
                                        quote(tfld::test::fixture_dir() / "i27"), format);
    const auto first = tfld::test::run(cmd);
    const auto second = tfld::test::run(cmd);
    c.expect(first.exit_code == 0 && !first.out.empty() && first.out == second.out,
             fmt::format("{} output differs between runs", format));
  }
  return finish(c, fmt::format("{} numeric fields bit-identical across 6 reports; reruns byte-identical", numbers));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Example 1 unification", example1_unification},
      {"Example 2 collective, separations, CI and reliance", example2},
      {"Case study item 27, round 1", case_study_round1},
      {"Case study item 27, round 2", case_study_round2},
      {"Oracle equivalence and invariant suite", property_substitute},
      {"Session sheet fixtures", session_io_fixtures},
      {"CLI and service parity, CLI determinism", cli_service_parity},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("{} [{}] {}: {}\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail);
    failed += o.pass ? 0 : 1;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
