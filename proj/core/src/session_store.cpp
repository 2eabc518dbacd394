#include "tfld/session_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "tfld/error.hpp"

namespace tfld {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kManifestFormat = "tfld-session/1";

// Exclusive advisory lock on <dir>/.lock for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    const std::string path = (dir / ".lock").string();
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(fmt::format("cannot open lock file {}", path));
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(fmt::format("cannot lock {}", path));
    }
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFoundError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out.flush()) throw Error(fmt::format("cannot write {}", tmp.string()));
  }
  fs::rename(tmp, p);
}

std::string input_digest(bool has_header, const std::string& responses,
                         const std::optional<std::string>& dimensions,
                         const std::optional<std::string>& descriptions) {
  std::string blob = has_header ? "header\n" : "noheader\n";
  auto add = [&](std::string_view tag, const std::optional<std::string>& s) {
    blob += tag;
    blob += s ? fmt::format(":{}:", s->size()) + *s : std::string(":absent:");
  };
  add("responses", responses);
  add("dimensions", dimensions);
  add("descriptions", descriptions);
  return sha256_hex(blob);
}

std::optional<std::string> read_optional(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p);
}

}  // namespace

SheetKind parse_sheet_kind(std::string_view name) {
  if (name == "responses") return SheetKind::Responses;
  if (name == "dimensions") return SheetKind::Dimensions;
  if (name == "descriptions" || name == "description") return SheetKind::Descriptions;
  throw ParameterError(fmt::format("unknown sheet '{}'", name));
}

std::string sheet_file_name(int round_number, SheetKind kind) {
  switch (kind) {
    case SheetKind::Responses:
      return fmt::format("Round{}Responses.csv", round_number);
    case SheetKind::Dimensions:
      return fmt::format("Round{}Dimensions.csv", round_number);
    case SheetKind::Descriptions:
      return fmt::format("Round{}Description.csv", round_number);
  }
  return {};
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string generate_session_id() {
  std::random_device rd;
  std::string id;
  for (int i = 0; i < 4; ++i) id += fmt::format("{:08x}", rd());
  return id;
}

SessionStore::SessionStore(fs::path dir, std::string id, bool has_header)
    : dir_(std::move(dir)), id_(std::move(id)), has_header_(has_header) {}

SessionStore SessionStore::create(const fs::path& root, std::string session_id, bool has_header) {
  if (session_id.empty()) session_id = generate_session_id();
  const fs::path dir = root / session_id;
  if (fs::exists(dir / kManifestName)) {
    throw SessionConflictError(fmt::format("session {} already exists", session_id));
  }
  fs::create_directories(dir);
  SessionStore store(dir, std::move(session_id), has_header);
  DirectoryLock lock(dir);
  store.save_manifest();
  return store;
}

SessionStore SessionStore::open(const fs::path& directory, std::optional<bool> has_header) {
  if (!fs::is_directory(directory)) {
    throw NotFoundError(fmt::format("session directory {} not found", directory.string()));
  }
  std::vector<int> rounds;
  std::string id = directory.filename().string();
  if (id.empty()) id = directory.parent_path().filename().string();
  bool header = true;
  std::map<int, std::vector<double>> history;

  const fs::path manifest = directory / kManifestName;
  if (fs::exists(manifest)) {
    json m;
    try {
      m = json::parse(read_file(manifest));
      id = m.at("session_id").get<std::string>();
      header = m.value("has_header", true);
      for (const auto& r : m.at("rounds")) {
        const int n = r.at("round").get<int>();
        rounds.push_back(n);
        history[n] = r.value("epsilon_history", std::vector<double>{});
      }
    } catch (const json::exception& e) {
      throw ParseError({Diagnostic{kManifestName, 0, 0, e.what()}});
    }
  } else {
    static const std::regex pattern(R"(Round([0-9]+)Responses\.csv)");
    for (const auto& entry : fs::directory_iterator(directory)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (std::regex_match(name, m, pattern)) rounds.push_back(std::stoi(m[1].str()));
    }
  }
  std::sort(rounds.begin(), rounds.end());
  if (has_header) header = *has_header;

  SessionStore store(directory, std::move(id), header);
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const int n = rounds[k];
    if (n != static_cast<int>(k) + 1) {
      throw SessionConflictError(fmt::format("rounds must be consecutive from 1; found round {}", n));
    }
    RoundState s;
    s.responses = read_file(directory / sheet_file_name(n, SheetKind::Responses));
    s.dimensions = read_optional(directory / sheet_file_name(n, SheetKind::Dimensions));
    s.descriptions = read_optional(directory / sheet_file_name(n, SheetKind::Descriptions));
    std::optional<std::string_view> dims, descs;
    if (s.dimensions) dims = *s.dimensions;
    if (s.descriptions) descs = *s.descriptions;
    s.inputs = assemble_round(n, s.responses, dims, descs, header);
    s.digest = input_digest(header, s.responses, s.dimensions, s.descriptions);
    s.epsilon_history = history[n];
    store.rounds_.emplace(n, std::move(s));
  }
  return store;
}

const RoundInputs& SessionStore::load_round(int round_number, std::string responses,
                                            std::optional<std::string> dimensions,
                                            std::optional<std::string> descriptions,
                                            bool overwrite) {
  if (round_number < 1) throw SessionConflictError("round numbers start at 1");
  if (has_round(round_number)) {
    if (!overwrite) {
      throw SessionConflictError(
          fmt::format("round {} is already loaded; pass overwrite to replace it", round_number));
    }
  } else if (round_number != static_cast<int>(rounds_.size()) + 1) {
    throw SessionConflictError(fmt::format("round {} cannot be loaded before round {}", round_number,
                                           rounds_.size() + 1));
  }
  RoundState next;
  std::optional<std::string_view> dims, descs;
  if (dimensions) dims = *dimensions;
  if (descriptions) descs = *descriptions;
  next.inputs = assemble_round(round_number, responses, dims, descs, has_header_);
  next.responses = std::move(responses);
  next.dimensions = std::move(dimensions);
  next.descriptions = std::move(descriptions);
  next.digest = input_digest(has_header_, next.responses, next.dimensions, next.descriptions);
  if (has_round(round_number)) next.epsilon_history = state(round_number).epsilon_history;
  commit(round_number, std::move(next));
  return state(round_number).inputs;
}

const RoundInputs& SessionStore::put_sheet(int round_number, SheetKind kind, std::string csv,
                                           bool overwrite) {
  if (kind == SheetKind::Responses) {
    if (!has_round(round_number)) return load_round(round_number, std::move(csv));
    if (!overwrite) {
      throw SessionConflictError(
          fmt::format("round {} already has responses; pass overwrite to replace them", round_number));
    }
    const RoundState& cur = state(round_number);
    return load_round(round_number, std::move(csv), cur.dimensions, cur.descriptions, true);
  }
  if (!has_round(round_number)) {
    throw SessionConflictError(
        fmt::format("round {} has no responses yet; upload the responses sheet first", round_number));
  }
  const RoundState& cur = state(round_number);
  std::optional<std::string> dims = cur.dimensions;
  std::optional<std::string> descs = cur.descriptions;
  std::optional<std::string>& target = kind == SheetKind::Dimensions ? dims : descs;
  if (target && !overwrite) {
    throw SessionConflictError(fmt::format("round {} already has a {} sheet; pass overwrite",
                                           round_number,
                                           kind == SheetKind::Dimensions ? "dimensions" : "description"));
  }
  target = std::move(csv);
  return load_round(round_number, cur.responses, std::move(dims), std::move(descs), true);
}

std::vector<int> SessionStore::round_numbers() const {
  std::vector<int> out;
  for (const auto& [n, _] : rounds_) out.push_back(n);
  return out;
}

SessionStore::RoundState& SessionStore::state(int round_number) {
  auto it = rounds_.find(round_number);
  if (it == rounds_.end()) throw NotFoundError(fmt::format("round {} not loaded", round_number));
  return it->second;
}

const SessionStore::RoundState& SessionStore::state(int round_number) const {
  auto it = rounds_.find(round_number);
  if (it == rounds_.end()) throw NotFoundError(fmt::format("round {} not loaded", round_number));
  return it->second;
}

const RoundInputs& SessionStore::round(int round_number) const { return state(round_number).inputs; }

const std::string& SessionStore::digest(int round_number) const { return state(round_number).digest; }

const std::vector<double>& SessionStore::epsilon_history(int round_number) const {
  return state(round_number).epsilon_history;
}

void SessionStore::commit(int round_number, RoundState next) {
  DirectoryLock lock(dir_);
  write_file_atomic(dir_ / sheet_file_name(round_number, SheetKind::Responses), next.responses);
  const std::pair<SheetKind, const std::optional<std::string>*> optional_sheets[] = {
      {SheetKind::Dimensions, &next.dimensions}, {SheetKind::Descriptions, &next.descriptions}};
  for (const auto& [kind, content] : optional_sheets) {
    const fs::path p = dir_ / sheet_file_name(round_number, kind);
    if (*content) {
      write_file_atomic(p, **content);
    } else {
      fs::remove(p);
    }
  }
  if (auto it = rounds_.find(round_number); it != rounds_.end()) {
    const std::string old = it->second.digest;
    std::erase_if(cache_, [&](const auto& entry) { return std::get<1>(entry.first) == old; });
  }
  rounds_.insert_or_assign(round_number, std::move(next));
  save_manifest();
}

void SessionStore::save_manifest() const {
  json rounds = json::array();
  for (const auto& [n, s] : rounds_) {
    json r{{"round", n},
           {"responses", sheet_file_name(n, SheetKind::Responses)},
           {"dimensions", nullptr},
           {"descriptions", nullptr},
           {"digest", s.digest},
           {"epsilon_history", s.epsilon_history}};
    if (s.dimensions) r["dimensions"] = sheet_file_name(n, SheetKind::Dimensions);
    if (s.descriptions) r["descriptions"] = sheet_file_name(n, SheetKind::Descriptions);
    rounds.push_back(std::move(r));
  }
  json m{{"format", kManifestFormat},
         {"session_id", id_},
         {"has_header", has_header_},
         {"rounds", std::move(rounds)}};
  write_file_atomic(dir_ / kManifestName, m.dump(2) + "\n");
}

std::shared_ptr<const RoundReport> SessionStore::report(int round_number,
                                                        const EvaluationOptions& options) const {
  check_epsilon(options.epsilon);
  const RoundState& s = state(round_number);
  const auto key = std::make_tuple(round_number, s.digest, options.epsilon, options.consensus_threshold);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto report = std::make_shared<const RoundReport>(evaluate_round(
      s.inputs.responses.items, s.inputs.panel, default_hierarchy(), options, round_number));
  cache_.emplace(key, report);
  return report;
}

RoundComparison SessionStore::compare(int round_a, int round_b,
                                      const EvaluationOptions& options) const {
  return compare_rounds(*report(round_a, options), *report(round_b, options));
}

void SessionStore::record_evaluation(int round_number, double epsilon) {
  check_epsilon(epsilon);
  DirectoryLock lock(dir_);
  state(round_number).epsilon_history.push_back(epsilon);
  save_manifest();
}

}  // namespace tfld
