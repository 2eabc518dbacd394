#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "tfld/delphi.hpp"
#include "tfld/linguistic.hpp"
#include "tfld/session_io.hpp"

namespace {

using namespace tfld;

struct Round {
  std::vector<AssessmentMatrix> matrices;
  PanelConfiguration panel;
};

// A full questionnaire: 45 items, 9 judges on mixed scales.
Round questionnaire(int items, int judges) {
  std::mt19937 rng(7);
  Round r;
  std::vector<int> levels;
  for (int i = 0; i < judges; ++i) levels.push_back(3 + 2 * (i % 3));
  r.panel = PanelConfiguration::uniform(levels, items);
  for (int item = 1; item <= items; ++item) {
    AssessmentMatrix m;
    m.item_id = item;
    for (int g : levels) {
      std::uniform_int_distribution<int> label(0, g - 1);
      m.labels.push_back({label(rng), label(rng), label(rng), label(rng)});
      m.relevance.push_back(std::uniform_real_distribution<double>(0.5, 1.0)(rng));
    }
    r.matrices.push_back(std::move(m));
  }
  return r;
}

void BM_EvaluateRound(benchmark::State& state) {
  const Round r = questionnaire(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_round(r.matrices, r.panel, default_hierarchy()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateRound)->Args({45, 9})->Args({45, 30})->Args({200, 9});

void BM_EpsilonSweep(benchmark::State& state) {
  const Round r = questionnaire(45, 9);
  std::vector<double> eps;
  for (int k = 0; k <= 100; ++k) eps.push_back(k / 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epsilon_sweep(r.matrices, r.panel, default_hierarchy(), eps));
  }
}
BENCHMARK(BM_EpsilonSweep);

void BM_Transform(benchmark::State& state) {
  const TermSetLevel& star = default_hierarchy().star_level();
  const TwoTuple x(4, 0.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(transform(x, star));
}
BENCHMARK(BM_Transform);

void BM_WeightedMean(benchmark::State& state) {
  std::vector<TwoTuple> values;
  std::vector<double> weights;
  for (int i = 0; i < state.range(0); ++i) {
    values.push_back(delta(std::fmod(0.37 * i, 12.0), 13));
    weights.push_back(1.0 + i % 5);
  }
  for (auto _ : state) benchmark::DoNotOptimize(weighted_extended_mean(values, weights));
}
BENCHMARK(BM_WeightedMean)->Arg(9)->Arg(100);

void BM_ParseResponses(benchmark::State& state) {
  const Round r = questionnaire(45, 9);
  ResponsesSheet sheet;
  sheet.judge_levels = r.panel.judge_levels;
  for (std::size_t i = 0; i < sheet.judge_levels.size(); ++i) sheet.judge_ids.push_back("J" + std::to_string(i + 1));
  sheet.items = r.matrices;
  for (auto& m : sheet.items) {
    for (double& v : m.relevance) v = std::round(v * 100.0) / 100.0;
  }
  const std::string csv = write_responses(sheet);
  for (auto _ : state) benchmark::DoNotOptimize(parse_responses(csv));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(csv.size()));
}
BENCHMARK(BM_ParseResponses);

}  // namespace

BENCHMARK_MAIN();
