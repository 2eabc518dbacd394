#pragma once
//
// A Delphi session on disk: one directory holding the raw round sheets
// (Round<N>Responses.csv, Round<N>Dimensions.csv, Round<N>Description.csv)
// and a manifest.json with round metadata.
//
// manifest.json keys:
//   format          "tfld-session/1"
//   session_id      opaque identifier
//   has_header      whether sheets carry a header row
//   rounds[]        { round, responses, dimensions|null, descriptions|null,
//                     digest (sha256 of the inputs), epsilon_history[] }
//
// Reports are derived data: computed on demand and cached in memory keyed by
// (round, input digest, epsilon, consensus threshold).
//

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tfld/delphi.hpp"
#include "tfld/session_io.hpp"

namespace tfld {

enum class SheetKind { Responses, Dimensions, Descriptions };

// "responses", "dimensions", "descriptions" (also "description").
SheetKind parse_sheet_kind(std::string_view name);
std::string sheet_file_name(int round_number, SheetKind kind);

// Hex SHA-256.
std::string sha256_hex(std::string_view data);

// Unguessable 128-bit hex identifier.
std::string generate_session_id();

class SessionStore {
 public:
  // Creates <root>/<id>/ with an empty manifest.
  static SessionStore create(const std::filesystem::path& root, std::string session_id = {},
                             bool has_header = true);

  // Opens an existing session directory. Without a manifest the rounds are
  // discovered from the Round<N>*.csv files present.
  static SessionStore open(const std::filesystem::path& directory,
                           std::optional<bool> has_header = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }
  bool has_header() const noexcept { return has_header_; }

  // Validates and stores a whole round atomically. Loading an existing round
  // needs `overwrite`; a new round must directly follow the last one.
  const RoundInputs& load_round(int round_number, std::string responses,
                                std::optional<std::string> dimensions = std::nullopt,
                                std::optional<std::string> descriptions = std::nullopt,
                                bool overwrite = false);

  // Replaces one sheet of a round. Responses create the round; the optional
  // sheets can only be added to an existing round.
  const RoundInputs& put_sheet(int round_number, SheetKind kind, std::string csv,
                               bool overwrite = false);

  std::vector<int> round_numbers() const;
  bool has_round(int round_number) const noexcept { return rounds_.count(round_number) != 0; }
  const RoundInputs& round(int round_number) const;
  const std::string& digest(int round_number) const;
  const std::vector<double>& epsilon_history(int round_number) const;

  std::shared_ptr<const RoundReport> report(int round_number,
                                            const EvaluationOptions& options = {}) const;

  RoundComparison compare(int round_a, int round_b, const EvaluationOptions& options = {}) const;

  // Appends epsilon to the round's history and rewrites the manifest.
  void record_evaluation(int round_number, double epsilon);

 private:
  struct RoundState {
    std::string responses;
    std::optional<std::string> dimensions;
    std::optional<std::string> descriptions;
    RoundInputs inputs;
    std::string digest;
    std::vector<double> epsilon_history;
  };

  SessionStore(std::filesystem::path dir, std::string id, bool has_header);

  RoundState& state(int round_number);
  const RoundState& state(int round_number) const;
  void commit(int round_number, RoundState next);
  void save_manifest() const;

  std::filesystem::path dir_;
  std::string id_;
  bool has_header_ = true;
  std::map<int, RoundState> rounds_;
  mutable std::map<std::tuple<int, std::string, double, double>, std::shared_ptr<const RoundReport>> cache_;
};

}  // namespace tfld
