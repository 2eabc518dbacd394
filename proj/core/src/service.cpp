#include "tfld/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <optional>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tfld/error.hpp"
#include "tfld/report_io.hpp"

namespace tfld {

namespace fs = std::filesystem;
using nlohmann::json;

struct Service::Session {
  explicit Session(SessionStore s) : store(std::move(s)) {}
  std::mutex mutex;
  SessionStore store;
};

namespace {

// Maps to an HTTP status; thrown for bad query parameters.
struct HttpError {
  int status;
  std::string message;
  std::vector<Diagnostic> diagnostics;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<Diagnostic>& diagnostics = {}) {
  json diags = json::array();
  for (const auto& d : diagnostics) {
    diags.push_back(json{{"sheet", d.sheet}, {"row", d.row}, {"column", d.column}, {"message", d.message}});
  }
  send_json(res, status,
            json{{"error", json{{"status", status}, {"message", message}, {"diagnostics", diags}}}});
}

// Runs a handler and turns library exceptions into JSON error responses.
httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status, e.message, e.diagnostics);
    } catch (const ParseError& e) {
      send_error(res, 400, e.what(), e.diagnostics());
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const SessionConflictError& e) {
      send_error(res, 409, e.what());
    } catch (const ParameterError& e) {
      send_error(res, 422, e.what());
    } catch (const ConfigurationError& e) {
      send_error(res, 400, e.what());
    } catch (const ComparisonError& e) {
      send_error(res, 422, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

double parse_epsilon(const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw HttpError{422, fmt::format("epsilon '{}' is not a number", text), {}};
  }
  if (!(v >= 0.0 && v <= 1.0)) throw HttpError{422, fmt::format("epsilon {} outside [0, 1]", v), {}};
  return v;
}

EvaluationOptions options_from(const httplib::Request& req) {
  EvaluationOptions o;
  if (auto e = param(req, "epsilon")) o.epsilon = parse_epsilon(*e);
  return o;
}

bool truthy(const std::optional<std::string>& v) {
  return v && (*v == "1" || *v == "true" || *v == "yes");
}

int parse_int(const std::string& text, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw HttpError{422, fmt::format("{} '{}' is not an integer", what, text), {}};
  }
  return v;
}

std::string normalize_key(std::string s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// --- item list view -------------------------------------------------------

enum class Filter { All, Clarity, Writing, Presence, AnsweringScale, Relevance, Consensus };

Filter parse_filter(const std::string& raw) {
  static const std::map<std::string, Filter> names = {
      {"all", Filter::All},
      {"allinformation", Filter::All},
      {"clarity", Filter::Clarity},
      {"collectiveclarity", Filter::Clarity},
      {"writing", Filter::Writing},
      {"collectivewriting", Filter::Writing},
      {"presence", Filter::Presence},
      {"collectivepresence", Filter::Presence},
      {"answeringscale", Filter::AnsweringScale},
      {"collectiveansweringscale", Filter::AnsweringScale},
      {"relevance", Filter::Relevance},
      {"averagerelevance", Filter::Relevance},
      {"consensus", Filter::Consensus},
  };
  auto it = names.find(normalize_key(raw));
  if (it == names.end()) throw HttpError{422, fmt::format("unknown filter '{}'", raw), {}};
  return it->second;
}

std::vector<std::string> columns_for(Filter f) {
  switch (f) {
    case Filter::All:
      return {"clarity", "writing", "presence", "answering_scale", "relevance", "item_score",
              "consensus_index", "consensus_status", "reliance_index", "reliance_status",
              "separations"};
    case Filter::Clarity:
      return {"clarity"};
    case Filter::Writing:
      return {"writing"};
    case Filter::Presence:
      return {"presence"};
    case Filter::AnsweringScale:
      return {"answering_scale"};
    case Filter::Relevance:
      return {"relevance"};
    case Filter::Consensus:
      return {"consensus_index", "consensus_status"};
  }
  return {};
}

// Numeric sort key of a column; 2-tuples sort by beta.
using SortKey = std::function<double(const ItemResult&)>;

SortKey parse_sort(const std::string& raw) {
  const std::string k = normalize_key(raw);
  auto criterion = [](std::size_t j) {
    return [j](const ItemResult& it) { return it.criterion_collectives[j].beta(); };
  };
  if (k == "item" || k == "itemid" || k == "id") return [](const ItemResult& it) { return double(it.item_id); };
  if (k == "clarity") return criterion(0);
  if (k == "writing") return criterion(1);
  if (k == "presence") return criterion(2);
  if (k == "answeringscale") return criterion(3);
  if (k == "relevance") return [](const ItemResult& it) { return it.relevance_collective; };
  if (k == "itemscore" || k == "is") return [](const ItemResult& it) { return it.item_score.beta(); };
  if (k == "consensusindex" || k == "ci") return [](const ItemResult& it) { return it.consensus_index; };
  if (k == "consensusstatus" || k == "cs") return [](const ItemResult& it) { return it.consensus_status ? 1.0 : 0.0; };
  if (k == "relianceindex" || k == "ri") return [](const ItemResult& it) { return it.reliance_index; };
  if (k == "reliancestatus" || k == "rs") return [](const ItemResult& it) { return it.reliance_status ? 1.0 : 0.0; };
  throw HttpError{422, fmt::format("unknown sort key '{}'", raw), {}};
}

int parse_trim(const std::string& raw) {
  std::string s = raw;
  if (!s.empty() && (s[0] == 's' || s[0] == 'S')) s.erase(0, 1);
  const int k = parse_int(s, "trim threshold");
  if (k < 0 || k > 6) throw HttpError{422, fmt::format("trim threshold '{}' outside s0..s6", raw), {}};
  return k;
}

json item_row(const ItemResult& it, const std::string& description, const std::vector<std::string>& columns) {
  json row{{"item_id", it.item_id}, {"description", description}};
  for (const auto& c : columns) {
    if (c == "clarity") row[c] = to_json(it.criterion_collectives[0]);
    else if (c == "writing") row[c] = to_json(it.criterion_collectives[1]);
    else if (c == "presence") row[c] = to_json(it.criterion_collectives[2]);
    else if (c == "answering_scale") row[c] = to_json(it.criterion_collectives[3]);
    else if (c == "relevance") row[c] = it.relevance_collective;
    else if (c == "item_score") row[c] = to_json(it.item_score);
    else if (c == "consensus_index") row[c] = it.consensus_index;
    else if (c == "consensus_status") row[c] = it.consensus_status;
    else if (c == "reliance_index") row[c] = it.reliance_index;
    else if (c == "reliance_status") row[c] = it.reliance_status;
    else if (c == "separations") row[c] = it.separations;
  }
  return row;
}

json items_view(const RoundReport& report, const std::vector<ItemDescription>& descriptions,
                const httplib::Request& req) {
  const Filter filter = parse_filter(param(req, "filter").value_or("All"));
  const std::vector<std::string> columns = columns_for(filter);
  const SortKey key = parse_sort(param(req, "sort").value_or("item_id"));
  const std::string dir = lower(param(req, "dir").value_or("asc"));
  if (dir != "asc" && dir != "desc") throw HttpError{422, fmt::format("unknown sort direction '{}'", dir), {}};
  const std::string search = lower(param(req, "search").value_or(""));
  const int threshold = parse_trim(param(req, "trim").value_or("s0"));

  const TrimResult trimmed = trim(report, threshold);
  std::vector<const ItemResult*> rows;
  for (const auto& it : report.items) {
    if (std::find(trimmed.hidden.begin(), trimmed.hidden.end(), it.item_id) != trimmed.hidden.end()) continue;
    const std::string& text = descriptions.at(static_cast<std::size_t>(it.item_id - 1)).text;
    if (!search.empty() && lower(text).find(search) == std::string::npos) continue;
    rows.push_back(&it);
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const ItemResult* a, const ItemResult* b) {
    return dir == "asc" ? key(*a) < key(*b) : key(*a) > key(*b);
  });
  json items = json::array();
  for (const ItemResult* it : rows) {
    items.push_back(item_row(*it, descriptions.at(static_cast<std::size_t>(it->item_id - 1)).text, columns));
  }
  return json{{"round", report.round_number},
              {"epsilon", report.epsilon},
              {"filter", param(req, "filter").value_or("All")},
              {"columns", columns},
              {"trim", fmt::format("s{}", threshold)},
              {"hidden_count", trimmed.hidden_count()},
              {"hidden_items", trimmed.hidden},
              {"item_count", report.items.size()},
              {"items", std::move(items)}};
}

std::string upload_body(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    if (req.files.empty()) throw HttpError{400, "multipart upload carries no file", {}};
    return req.files.begin()->second.content;
  }
  return req.body;
}

bool valid_session_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_'; });
}

json session_summary(const SessionStore& s) {
  json rounds = json::array();
  for (int n : s.round_numbers()) {
    const RoundInputs& in = s.round(n);
    rounds.push_back(json{{"round", n},
                          {"judges", in.responses.judge_count()},
                          {"items", in.responses.item_count()},
                          {"dimensions_supplied", in.dimensions_supplied},
                          {"descriptions_supplied", in.descriptions_supplied},
                          {"digest", s.digest(n)},
                          {"epsilon_history", s.epsilon_history(n)}});
  }
  return json{{"session_id", s.id()}, {"has_header", s.has_header()}, {"rounds", std::move(rounds)}};
}

}  // namespace

Service::Service(fs::path session_root) : root_(std::move(session_root)) {
  fs::create_directories(root_);
}

Service::~Service() = default;

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) {
  if (!valid_session_id(id)) throw NotFoundError(fmt::format("session '{}' not found", id));
  std::lock_guard lock(sessions_mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  const fs::path dir = root_ / id;
  if (!fs::exists(dir / "manifest.json")) throw NotFoundError(fmt::format("session '{}' not found", id));
  auto s = std::make_shared<Session>(SessionStore::open(dir));
  sessions_.emplace(id, s);
  return s;
}

std::shared_ptr<Service::Session> Service::create_session(bool has_header) {
  auto s = std::make_shared<Session>(SessionStore::create(root_, {}, has_header));
  std::lock_guard lock(sessions_mutex_);
  sessions_.emplace(s->store.id(), s);
  return s;
}

void Service::register_routes(httplib::Server& server) {
  server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    bool has_header = true;
    if (auto h = param(req, "header")) has_header = truthy(h);
    if (!req.body.empty() && req.get_header_value("Content-Type").find("json") != std::string::npos) {
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) throw HttpError{400, "request body is not JSON", {}};
      has_header = body.value("has_header", has_header);
    }
    auto s = create_session(has_header);
    send_json(res, 201, json{{"session_id", s->store.id()}, {"has_header", has_header}});
  }));

  server.Get(R"(/api/sessions/([A-Za-z0-9_-]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find_session(req.matches[1]);
               std::lock_guard lock(s->mutex);
               send_json(res, 200, session_summary(s->store));
             }));

  server.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/rounds/([0-9]+)/([a-z]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = find_session(req.matches[1]);
                const int round = parse_int(req.matches[2], "round");
                SheetKind kind;
                try {
                  kind = parse_sheet_kind(req.matches[3].str());
                } catch (const ParameterError& e) {
                  throw NotFoundError(e.what());
                }
                const bool overwrite = truthy(param(req, "overwrite"));
                std::string body = upload_body(req);
                std::lock_guard lock(s->mutex);
                const RoundInputs& in = s->store.put_sheet(round, kind, std::move(body), overwrite);
                send_json(res, 201,
                          json{{"round", round},
                               {"sheet", req.matches[3].str()},
                               {"judges", in.responses.judge_count()},
                               {"items", in.responses.item_count()},
                               {"dimensions", in.panel.dimensions.size()},
                               {"dimensions_supplied", in.dimensions_supplied},
                               {"descriptions_supplied", in.descriptions_supplied},
                               {"warnings", in.warnings},
                               {"digest", s->store.digest(round)}});
              }));

  server.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/rounds/([0-9]+)/report)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find_session(req.matches[1]);
               const int round = parse_int(req.matches[2], "round");
               const EvaluationOptions options = options_from(req);
               std::lock_guard lock(s->mutex);
               auto report = s->store.report(round, options);
               const auto& history = s->store.epsilon_history(round);
               if (std::find(history.begin(), history.end(), options.epsilon) == history.end()) {
                 s->store.record_evaluation(round, options.epsilon);
               }
               send_json(res, 200, to_json(*report, s->store.round(round).descriptions));
             }));

  server.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/rounds/([0-9]+)/items)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find_session(req.matches[1]);
               const int round = parse_int(req.matches[2], "round");
               const EvaluationOptions options = options_from(req);
               std::lock_guard lock(s->mutex);
               auto report = s->store.report(round, options);
               send_json(res, 200, items_view(*report, s->store.round(round).descriptions, req));
             }));

  server.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/rounds/([0-9]+)/sweep)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find_session(req.matches[1]);
               const int round = parse_int(req.matches[2], "round");
               std::vector<double> epsilons;
               const std::string list = param(req, "epsilons").value_or("0.75");
               std::size_t pos = 0;
               while (pos <= list.size()) {
                 const std::size_t comma = std::min(list.find(',', pos), list.size());
                 epsilons.push_back(parse_epsilon(list.substr(pos, comma - pos)));
                 pos = comma + 1;
               }
               std::lock_guard lock(s->mutex);
               const RoundInputs& in = s->store.round(round);
               send_json(res, 200,
                         json{{"round", round},
                              {"points", to_json(epsilon_sweep(in.responses.items, in.panel,
                                                               default_hierarchy(), epsilons))}});
             }));

  server.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/compare)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = find_session(req.matches[1]);
               const auto a = param(req, "a");
               const auto b = param(req, "b");
               if (!a || !b) throw HttpError{422, "compare needs both a and b round numbers", {}};
               const int ra = parse_int(*a, "round a");
               const int rb = parse_int(*b, "round b");
               const EvaluationOptions options = options_from(req);
               std::lock_guard lock(s->mutex);
               send_json(res, 200, to_json(s->store.compare(ra, rb, options)));
             }));
}

int run_server(const ServerOptions& options) {
  Service service(options.session_root);
  httplib::Server server;
  service.register_routes(server);
  if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir.string())) {
    throw ConfigurationError(fmt::format("static directory {} not found", options.static_dir.string()));
  }
  if (!server.listen(options.host, options.port)) {
    throw Error(fmt::format("cannot listen on {}:{}", options.host, options.port));
  }
  return 0;
}

}  // namespace tfld
