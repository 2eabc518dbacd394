// tfld: batch front-end over a session directory.
//
//   tfld evaluate --session DIR --round N [--epsilon E] [--format text|csv|json] [--output FILE]
//   tfld sweep    --session DIR --round N --epsilon E [--epsilon E ...]
//   tfld trim     --session DIR --round N --threshold s5
//   tfld compare  --session DIR --round A --round B
//   tfld serve    [--session-root DIR] [--host H] [--port P] [--static DIR]
//
// Exit codes: 0 ok, 1 invalid input data, 2 bad usage. Errors are printed as a
// single "error[kind]: message" line on stderr.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tfld/error.hpp"
#include "tfld/report_io.hpp"
#include "tfld/service.hpp"
#include "tfld/session_store.hpp"

namespace {

using namespace tfld;

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string session;
  std::vector<int> rounds;
  std::vector<double> epsilons;
  std::string threshold;
  std::string format = "text";
  std::string output;
  bool no_header = false;
};

std::string fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

const char* boolean(bool b) { return b ? "true" : "false"; }

SessionStore open_session(const Flags& f) {
  if (f.session.empty()) throw UsageError("--session is required");
  std::optional<bool> header;
  if (f.no_header) header = false;
  return SessionStore::open(f.session, header);
}

int single_round(const Flags& f) {
  if (f.rounds.size() != 1) throw UsageError("exactly one --round is required");
  return f.rounds.front();
}

void require_round(const SessionStore& store, int round) {
  if (!store.has_round(round)) {
    throw NotFoundError(fmt::format("round {} has no {} sheet in {}", round,
                                    sheet_file_name(round, SheetKind::Responses),
                                    store.directory().string()));
  }
}

double single_epsilon(const Flags& f) {
  if (f.epsilons.size() > 1) throw UsageError("evaluate takes a single --epsilon");
  const double e = f.epsilons.empty() ? kDefaultEpsilon : f.epsilons.front();
  check_epsilon(e);
  return e;
}

int parse_threshold(const std::string& raw) {
  std::string s = raw;
  if (!s.empty() && (s[0] == 's' || s[0] == 'S')) s.erase(0, 1);
  try {
    std::size_t used = 0;
    const int k = std::stoi(s, &used);
    if (used == s.size()) return k;
  } catch (const std::exception&) {
  }
  throw UsageError(fmt::format("threshold '{}' is not a label like s5 or an integer", raw));
}

ReportFormat format_of(const Flags& f) {
  try {
    return parse_report_format(f.format);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

void emit(const Flags& f, const std::string& text) {
  if (f.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(f.output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", f.output));
  out << text;
}

std::string evaluate_summary(const RoundReport& r) {
  std::string out = fmt::format("round {} epsilon={}\n", r.round_number, fixed(r.epsilon, 2));
  std::size_t cs_false = 0;
  std::size_t rs_false = 0;
  for (const auto& it : r.items) {
    out += fmt::format("I{} IS={} CI={} CS={} RI={} RS={} W={}\n", it.item_id,
                       format_two_tuple(it.item_score), fixed(it.consensus_index, 3),
                       boolean(it.consensus_status), fixed(it.reliance_index, 2),
                       boolean(it.reliance_status), fixed(it.relevance_collective, 3));
    cs_false += it.consensus_status ? 0 : 1;
    rs_false += it.reliance_status ? 0 : 1;
  }
  static const char* names[] = {"CC", "CW", "CP", "CAS"};
  for (std::size_t j = 0; j < r.criterion_collectives.size(); ++j) {
    out += fmt::format("{}={}\n", names[j], format_two_tuple(r.criterion_collectives[j]));
  }
  out += fmt::format("QS={}\n", format_two_tuple(r.questionnaire_score));
  out += fmt::format("CS=false items: {}\nRS=false items: {}\n", cs_false, rs_false);
  return out;
}

int cmd_evaluate(const Flags& f) {
  const int round = single_round(f);
  const double eps = single_epsilon(f);
  const ReportFormat format = format_of(f);
  const SessionStore store = open_session(f);
  require_round(store, round);
  EvaluationOptions options;
  options.epsilon = eps;
  const auto report = store.report(round, options);
  const auto& descriptions = store.round(round).descriptions;

  if (!f.output.empty()) {
    emit(f, export_report(*report, format, descriptions));
    std::cout << evaluate_summary(*report);
  } else if (format == ReportFormat::Text) {
    std::cout << evaluate_summary(*report);
  } else {
    std::cout << export_report(*report, format, descriptions);
  }
  return 0;
}

int cmd_sweep(const Flags& f) {
  const int round = single_round(f);
  if (f.epsilons.empty()) throw UsageError("sweep needs at least one --epsilon");
  for (double e : f.epsilons) check_epsilon(e);
  const ReportFormat format = format_of(f);
  const SessionStore store = open_session(f);
  require_round(store, round);
  const RoundInputs& in = store.round(round);
  const auto points = epsilon_sweep(in.responses.items, in.panel, default_hierarchy(), f.epsilons);

  std::string out;
  switch (format) {
    case ReportFormat::Json:
      out = to_json(points).dump(2) + "\n";
      break;
    case ReportFormat::Csv:
      out = "epsilon,reliable,consensual,items\n";
      for (const auto& p : points) {
        out += fmt::format("{},{},{},{}\n", p.epsilon, p.reliable_items, p.consensual_items, p.item_count);
      }
      break;
    case ReportFormat::Text:
      out = fmt::format("{:>8}  {:>8}  {:>10}  {:>5}\n", "epsilon", "RS=true", "CS=true", "items");
      for (const auto& p : points) {
        out += fmt::format("{:>8}  {:>8}  {:>10}  {:>5}\n", fixed(p.epsilon, 3), p.reliable_items,
                           p.consensual_items, p.item_count);
      }
      break;
  }
  emit(f, out);
  return 0;
}

int cmd_trim(const Flags& f) {
  const int round = single_round(f);
  if (f.threshold.empty()) throw UsageError("trim needs --threshold");
  const int k = parse_threshold(f.threshold);
  const double eps = single_epsilon(f);
  const ReportFormat format = format_of(f);
  const SessionStore store = open_session(f);
  require_round(store, round);
  EvaluationOptions options;
  options.epsilon = eps;
  const auto report = store.report(round, options);
  TrimResult t;
  try {
    t = trim(*report, k);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  std::string out;
  switch (format) {
    case ReportFormat::Json:
      out = to_json(t, k).dump(2) + "\n";
      break;
    case ReportFormat::Csv:
      out = "item_id,is_label,is_alpha,status\n";
      for (const auto& it : report->items) {
        const bool hidden = std::find(t.hidden.begin(), t.hidden.end(), it.item_id) != t.hidden.end();
        out += fmt::format("{},s{},{},{}\n", it.item_id, it.item_score.label_index(),
                           fixed(it.item_score.alpha(), 3), hidden ? "hidden" : "retained");
      }
      break;
    case ReportFormat::Text:
      out = fmt::format("threshold s{}: {} retained, {} hidden\n", k, t.retained.size(), t.hidden_count());
      for (const auto& it : report->items) {
        const bool hidden = std::find(t.hidden.begin(), t.hidden.end(), it.item_id) != t.hidden.end();
        out += fmt::format("{:>5}  {:<14}  {}\n", it.item_id, format_two_tuple(it.item_score),
                           hidden ? "hidden" : "retained");
      }
      break;
  }
  emit(f, out);
  return 0;
}

int cmd_compare(const Flags& f) {
  if (f.rounds.size() != 2) throw UsageError("compare needs --round twice");
  const double eps = single_epsilon(f);
  const ReportFormat format = format_of(f);
  const SessionStore store = open_session(f);
  require_round(store, f.rounds[0]);
  require_round(store, f.rounds[1]);
  EvaluationOptions options;
  options.epsilon = eps;
  const RoundComparison cmp = store.compare(f.rounds[0], f.rounds[1], options);

  auto flip = [](bool a, bool b) { return fmt::format("{}->{}", boolean(a), boolean(b)); };
  std::string out;
  switch (format) {
    case ReportFormat::Json:
      out = to_json(cmp).dump(2) + "\n";
      break;
    case ReportFormat::Csv:
      out = "item_id,d_is,d_ci,d_ri,d_relevance,cs,rs,regressed\n";
      for (const auto& d : cmp.items) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", d.item_id, fixed(d.item_score_delta, 3),
                           fixed(d.consensus_delta, 3), fixed(d.reliance_delta, 2),
                           fixed(d.relevance_delta, 3), flip(d.consensus_before, d.consensus_after),
                           flip(d.reliance_before, d.reliance_after), boolean(d.regressed));
      }
      break;
    case ReportFormat::Text:
      out = fmt::format("round {} -> round {}\n", cmp.round_a, cmp.round_b);
      out += fmt::format("{:>5}  {:>7}  {:>7}  {:>6}  {:>7}  {:<12}  {:<12}  {}\n", "Item", "dIS", "dCI",
                         "dRI", "dW", "CS", "RS", "regressed");
      for (const auto& d : cmp.items) {
        out += fmt::format("{:>5}  {:>7}  {:>7}  {:>6}  {:>7}  {:<12}  {:<12}  {}\n", d.item_id,
                           fixed(d.item_score_delta, 3), fixed(d.consensus_delta, 3),
                           fixed(d.reliance_delta, 2), fixed(d.relevance_delta, 3),
                           flip(d.consensus_before, d.consensus_after),
                           flip(d.reliance_before, d.reliance_after), boolean(d.regressed));
      }
      out += fmt::format("QS delta {}  regressed items {}\n", fixed(cmp.questionnaire_score_delta, 3),
                         cmp.regressed_count);
      break;
  }
  emit(f, out);
  return 0;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-tuple fuzzy linguistic Delphi evaluation"};
  app.require_subcommand(1);

  Flags f;
  auto common = [&](CLI::App* sub, bool multi_round, bool multi_eps) {
    sub->add_option("--session", f.session, "Session directory")->required();
    auto* r = sub->add_option("--round", f.rounds, "Round number")->required();
    if (!multi_round) r->expected(1);
    auto* e = sub->add_option("--epsilon", f.epsilons, "Satisfactory reliance level in [0, 1]");
    if (!multi_eps) e->expected(1);
    sub->add_option("--format", f.format, "text, csv or json");
    sub->add_option("--output", f.output, "Write the report here instead of standard output");
    sub->add_flag("--no-header", f.no_header, "Sheets have no header row");
  };

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate one round");
  common(evaluate, false, false);
  auto* sweep = app.add_subcommand("sweep", "Count reliable items for several epsilon values");
  common(sweep, false, true);
  auto* trim_cmd = app.add_subcommand("trim", "Partition items by an item-score threshold label");
  common(trim_cmd, false, false);
  trim_cmd->add_option("--threshold", f.threshold, "Threshold label, s0..s6")->required();
  auto* compare = app.add_subcommand("compare", "Compare two rounds");
  common(compare, true, false);

  ServerOptions server;
  server.session_root = env_or("TFLD_SESSION_ROOT", "sessions");
  server.host = env_or("TFLD_BIND", server.host);
  std::string port = env_or("TFLD_PORT", std::to_string(server.port));
  std::string session_root = server.session_root.string();
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--session-root", session_root, "Directory holding sessions");
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--static", static_dir, "Dashboard assets to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*evaluate) return cmd_evaluate(f);
    if (*sweep) return cmd_sweep(f);
    if (*trim_cmd) return cmd_trim(f);
    if (*compare) {
      if (f.rounds.size() != 2) throw UsageError("compare needs --round twice");
      return cmd_compare(f);
    }
    if (*serve) {
      try {
        server.port = std::stoi(port);
      } catch (const std::exception&) {
        throw UsageError(fmt::format("port '{}' is not a number", port));
      }
      server.session_root = session_root;
      server.static_dir = static_dir;
      std::cerr << fmt::format("listening on {}:{}\n", server.host, server.port);
      return run_server(server);
    }
  } catch (const UsageError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error[validation]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error[validation]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
