#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "tfld/delphi.hpp"

namespace tfld::test {

inline std::filesystem::path fixture_dir() { return TFLD_FIXTURE_DIR; }
inline std::filesystem::path cli_path() { return TFLD_CLI_PATH; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& relative) { return read_file(fixture_dir() / relative); }

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs a shell command, capturing standard output (stderr merged if asked).
inline CommandResult run(const std::string& command, bool merge_stderr = false) {
  const std::string full = merge_stderr ? command + " 2>&1" : command + " 2>/dev/null";
  CommandResult r;
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tfld-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Copies a fixture session into dir, returning dir.
inline std::filesystem::path copy_fixture(const std::string& name, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir() / name)) {
    std::filesystem::copy_file(e.path(), dir / e.path().filename(),
                               std::filesystem::copy_options::overwrite_existing);
  }
  return dir;
}

// A random questionnaire round: matrices plus panel.
struct RandomRound {
  std::vector<AssessmentMatrix> matrices;
  PanelConfiguration panel;
};

inline RandomRound random_round(std::mt19937_64& rng, int min_judges = 3, int max_judges = 9,
                                int min_items = 1, int max_items = 10) {
  static constexpr int kLevels[] = {3, 5, 7};
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RandomRound r;
  const int p = uniform_int(min_judges, max_judges);
  const int n = uniform_int(min_items, max_items);
  for (int i = 0; i < p; ++i) {
    r.panel.judge_ids.push_back("J" + std::to_string(i + 1));
    r.panel.judge_levels.push_back(kLevels[uniform_int(0, 2)]);
  }
  int first = 1;
  int dim = 1;
  while (first <= n) {
    const int last = std::min(n, first + uniform_int(0, 4));
    DimensionRange d;
    d.id = "D" + std::to_string(dim++);
    d.first_item = first;
    d.last_item = last;
    double sum = 0.0;
    for (int i = 0; i < p; ++i) {
      d.weights.push_back(0.05 + unit(rng));
      sum += d.weights.back();
    }
    for (double& w : d.weights) w /= sum;
    r.panel.dimensions.push_back(std::move(d));
    first = last + 1;
  }
  for (int item = 1; item <= n; ++item) {
    AssessmentMatrix m;
    m.item_id = item;
    for (int i = 0; i < p; ++i) {
      std::array<int, kCriteriaCount> row{};
      for (auto& label : row) label = uniform_int(0, r.panel.judge_levels[i] - 1);
      m.labels.push_back(row);
      m.relevance.push_back(std::round(unit(rng) * 100.0) / 100.0);
    }
    r.matrices.push_back(std::move(m));
  }
  return r;
}

}  // namespace tfld::test
