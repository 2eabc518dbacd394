#include "tfld/delphi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tfld/error.hpp"

namespace tfld {

std::string_view criterion_name(Criterion c) noexcept {
  switch (c) {
    case Criterion::Clarity:
      return "Clarity";
    case Criterion::Writing:
      return "Writing";
    case Criterion::Presence:
      return "Presence";
    case Criterion::AnsweringScale:
      return "AnsweringScale";
  }
  return "?";
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError(fmt::format("epsilon {} outside [0, 1]", epsilon));
  }
}

// ---------------------------------------------------------------------------
// Panel

std::vector<std::string> PanelConfiguration::validate(int item_count,
                                                      const ExtendedHierarchy& elh) const {
  std::vector<std::string> warnings;
  const std::size_t p = judge_count();
  if (p == 0) throw ConfigurationError("panel has no judges");
  if (!judge_ids.empty() && judge_ids.size() != p) {
    throw ConfigurationError(fmt::format("{} judge ids for {} judges", judge_ids.size(), p));
  }
  if (p < kMinimumPanelSize) {
    warnings.push_back(fmt::format("panel of {} judges is below the minimum of {}", p,
                                   kMinimumPanelSize));
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (!elh.contains(judge_levels[i])) {
      throw ConfigurationError(
          fmt::format("judge {} uses S^{} which is not in the hierarchy", i + 1, judge_levels[i]));
    }
  }
  if (item_count < 1) throw ConfigurationError("questionnaire has no items");
  if (dimensions.empty()) throw ConfigurationError("no dimensions configured");

  int expected_first = 1;
  for (const auto& d : dimensions) {
    if (d.first_item != expected_first) {
      throw ConfigurationError(fmt::format("dimension {} starts at item {}, expected {}", d.id,
                                           d.first_item, expected_first));
    }
    if (d.last_item < d.first_item) {
      throw ConfigurationError(fmt::format("dimension {} ends before it starts", d.id));
    }
    if (d.weights.size() != p) {
      throw ConfigurationError(
          fmt::format("dimension {} has {} weights for {} judges", d.id, d.weights.size(), p));
    }
    double sum = 0.0;
    for (double w : d.weights) {
      if (!(w >= 0.0)) throw ConfigurationError(fmt::format("dimension {} has a negative weight", d.id));
      sum += w;
    }
    if (!weight_sum_acceptable(sum)) {
      throw ConfigurationError(fmt::format("dimension {} weights sum to {}", d.id, sum));
    }
    expected_first = d.last_item + 1;
  }
  if (expected_first - 1 != item_count) {
    throw ConfigurationError(fmt::format("dimensions cover items 1..{} but the questionnaire has {}",
                                         expected_first - 1, item_count));
  }
  return warnings;
}

const DimensionRange& PanelConfiguration::dimension_for(int item_id) const {
  for (const auto& d : dimensions) {
    if (d.contains(item_id)) return d;
  }
  throw ConfigurationError(fmt::format("item {} belongs to no dimension", item_id));
}

PanelConfiguration PanelConfiguration::uniform(std::vector<int> judge_levels, int item_count) {
  PanelConfiguration panel;
  const std::size_t p = judge_levels.size();
  panel.judge_levels = std::move(judge_levels);
  DimensionRange all;
  all.id = "D1";
  all.first_item = 1;
  all.last_item = item_count;
  all.weights.assign(p, p == 0 ? 0.0 : 1.0 / static_cast<double>(p));
  panel.dimensions.push_back(std::move(all));
  return panel;
}

// ---------------------------------------------------------------------------
// Report helpers

std::vector<double> RoundReport::average_relevance() const {
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.relevance_collective);
  return out;
}

const ItemResult& RoundReport::item(int item_id) const {
  for (const auto& it : items) {
    if (it.item_id == item_id) return it;
  }
  throw NotFoundError(fmt::format("item {} not in report", item_id));
}

// ---------------------------------------------------------------------------
// Pipeline phases

StarGrid unify_matrix(const AssessmentMatrix& matrix, const PanelConfiguration& panel,
                      const ExtendedHierarchy& elh) {
  if (matrix.judge_count() != panel.judge_count()) {
    throw ConfigurationError(fmt::format("item {} has {} judges, panel has {}", matrix.item_id,
                                         matrix.judge_count(), panel.judge_count()));
  }
  const TermSetLevel& star = elh.star_level();
  StarGrid grid;
  grid.reserve(matrix.judge_count());
  for (std::size_t i = 0; i < matrix.judge_count(); ++i) {
    const TermSetLevel& level = elh.level(panel.judge_levels[i]);
    std::vector<TwoTuple> row;
    row.reserve(kCriteriaCount);
    for (int label : matrix.labels[i]) {
      row.push_back(transform(make_two_tuple(label, level), star));
    }
    grid.push_back(std::move(row));
  }
  return grid;
}

CriteriaAggregate aggregate_criteria(const StarGrid& unified, const AssessmentMatrix& matrix,
                                     std::span<const double> judge_weights) {
  const std::size_t p = unified.size();
  if (p == 0) throw InputDomainError("no judges to aggregate");
  if (judge_weights.size() != p || matrix.relevance.size() != p) {
    throw InputDomainError(fmt::format("item {}: {} judges, {} weights, {} relevance values",
                                       matrix.item_id, p, judge_weights.size(),
                                       matrix.relevance.size()));
  }
  const std::size_t q = unified.front().size();
  CriteriaAggregate out;
  out.collectives.reserve(q);
  std::vector<TwoTuple> column(p);
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t i = 0; i < p; ++i) column[i] = unified[i].at(j);
    out.collectives.push_back(weighted_extended_mean(column, judge_weights));
  }
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    weight_sum += judge_weights[i];
    weighted += matrix.relevance[i] * judge_weights[i];
  }
  out.relevance = weighted / weight_sum;
  return out;
}

TwoTuple collective_score(std::span<const TwoTuple> criterion_collectives) {
  return extended_mean(criterion_collectives);
}

TwoTuple item_score(const TwoTuple& overall, const TermSetLevel& output_level) {
  return transform(overall, output_level);
}

std::vector<double> separations(const StarGrid& unified, std::span<const TwoTuple> collectives) {
  std::vector<double> rho;
  rho.reserve(unified.size());
  for (const auto& row : unified) {
    if (row.size() != collectives.size()) {
      throw InputDomainError(fmt::format("row has {} criteria, collective has {}", row.size(),
                                         collectives.size()));
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double d = delta_inv(row[j]) - delta_inv(collectives[j]);
      sq += d * d;
    }
    rho.push_back(std::sqrt(sq));
  }
  return rho;
}

ConsensusResult consensus(std::span<const double> separations, std::span<const double> judge_weights,
                          int star_max_index, double threshold) {
  if (separations.size() != judge_weights.size() || separations.empty()) {
    throw InputDomainError(fmt::format("{} separations for {} weights", separations.size(),
                                       judge_weights.size()));
  }
  if (star_max_index <= 0) throw InputDomainError("star level max index must be positive");
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < separations.size(); ++i) {
    weight_sum += judge_weights[i];
    weighted += separations[i] * judge_weights[i];
  }
  if (!(weight_sum > 0.0)) throw InputDomainError("judge weights sum to zero");
  ConsensusResult r;
  r.raw_index = 1.0 - (weighted / weight_sum) / star_max_index;
  r.index = std::clamp(r.raw_index, 0.0, 1.0);
  r.status = r.index >= threshold - kDecisionTolerance;
  return r;
}

RelianceResult reliance(std::span<const TwoTuple> collectives, double epsilon) {
  check_epsilon(epsilon);
  if (collectives.empty()) throw InputDomainError("no criteria to assess reliance on");
  const double bar = collectives.front().max_index() * epsilon;
  std::size_t passing = 0;
  for (const auto& y : collectives) {
    if (delta_inv(y) >= bar - kDecisionTolerance) ++passing;
  }
  RelianceResult r;
  r.index = static_cast<double>(passing) / static_cast<double>(collectives.size());
  r.status = r.index >= epsilon - kDecisionTolerance;
  return r;
}

ItemResult evaluate_item(const AssessmentMatrix& matrix, const PanelConfiguration& panel,
                         const ExtendedHierarchy& elh, const EvaluationOptions& options) {
  check_epsilon(options.epsilon);
  if (matrix.relevance.size() != matrix.judge_count()) {
    throw InputDomainError(fmt::format("item {}: relevance column has {} entries for {} judges",
                                       matrix.item_id, matrix.relevance.size(),
                                       matrix.judge_count()));
  }
  for (double r : matrix.relevance) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InputDomainError(fmt::format("item {}: relevance {} outside [0, 1]", matrix.item_id, r));
    }
  }
  const DimensionRange& dim = panel.dimension_for(matrix.item_id);
  const StarGrid unified = unify_matrix(matrix, panel, elh);
  CriteriaAggregate agg = aggregate_criteria(unified, matrix, dim.weights);

  ItemResult r;
  r.item_id = matrix.item_id;
  r.overall = collective_score(agg.collectives);
  r.item_score = item_score(r.overall, elh.levels().back());
  r.separations = separations(unified, agg.collectives);
  const auto c = consensus(r.separations, dim.weights, elh.star_level().max_index(),
                           options.consensus_threshold);
  r.consensus_index = c.index;
  r.raw_consensus_index = c.raw_index;
  r.consensus_status = c.status;
  const auto rel = reliance(agg.collectives, options.epsilon);
  r.reliance_index = rel.index;
  r.reliance_status = rel.status;
  r.relevance_collective = agg.relevance;
  r.criterion_collectives = std::move(agg.collectives);
  return r;
}

RoundReport evaluate_round(std::span<const AssessmentMatrix> matrices,
                           const PanelConfiguration& panel, const ExtendedHierarchy& elh,
                           const EvaluationOptions& options, int round_number) {
  check_epsilon(options.epsilon);
  if (matrices.empty()) throw ConfigurationError("round has no items");
  if (round_number < 1) throw ConfigurationError("round numbers start at 1");
  panel.validate(static_cast<int>(matrices.size()), elh);
  for (std::size_t r = 0; r < matrices.size(); ++r) {
    if (matrices[r].item_id != static_cast<int>(r) + 1) {
      throw ConfigurationError(fmt::format("item at position {} has id {}", r + 1,
                                           matrices[r].item_id));
    }
  }

  RoundReport report;
  report.round_number = round_number;
  report.epsilon = options.epsilon;
  report.consensus_threshold = options.consensus_threshold;
  report.items.reserve(matrices.size());
  for (const auto& m : matrices) report.items.push_back(evaluate_item(m, panel, elh, options));

  std::vector<double> weights = report.average_relevance();
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  const TermSetLevel& out = elh.levels().back();
  std::vector<TwoTuple> column(report.items.size());
  for (std::size_t j = 0; j < kCriteriaCount; ++j) {
    for (std::size_t r = 0; r < report.items.size(); ++r) {
      column[r] = report.items[r].criterion_collectives[j];
    }
    report.criterion_collectives.push_back(transform(weighted_extended_mean(column, weights), out));
  }
  for (std::size_t r = 0; r < report.items.size(); ++r) column[r] = report.items[r].item_score;
  report.questionnaire_score = weighted_extended_mean(column, weights);
  return report;
}

// ---------------------------------------------------------------------------
// Moderator tools

TrimResult trim(const RoundReport& report, int threshold) {
  const int max_label = report.items.empty() ? 6 : report.items.front().item_score.max_index();
  if (threshold < 0 || threshold > max_label) {
    throw ParameterError(fmt::format("trim threshold s{} outside s0..s{}", threshold, max_label));
  }
  TrimResult out;
  for (const auto& it : report.items) {
    (it.item_score.label_index() < threshold ? out.hidden : out.retained).push_back(it.item_id);
  }
  return out;
}

RoundComparison compare_rounds(const RoundReport& a, const RoundReport& b) {
  if (a.items.size() != b.items.size()) {
    throw ComparisonError(fmt::format("round {} has {} items, round {} has {}", a.round_number,
                                      a.items.size(), b.round_number, b.items.size()));
  }
  RoundComparison cmp;
  cmp.round_a = a.round_number;
  cmp.round_b = b.round_number;
  cmp.items.reserve(a.items.size());
  for (std::size_t r = 0; r < a.items.size(); ++r) {
    const ItemResult& x = a.items[r];
    const ItemResult& y = b.items[r];
    if (x.item_id != y.item_id) {
      throw ComparisonError(fmt::format("item ids differ at position {}: {} vs {}", r + 1,
                                        x.item_id, y.item_id));
    }
    ItemDelta d;
    d.item_id = x.item_id;
    d.item_score_delta = delta_inv(y.item_score) - delta_inv(x.item_score);
    d.consensus_delta = y.consensus_index - x.consensus_index;
    d.reliance_delta = y.reliance_index - x.reliance_index;
    d.relevance_delta = y.relevance_collective - x.relevance_collective;
    d.consensus_before = x.consensus_status;
    d.consensus_after = y.consensus_status;
    d.reliance_before = x.reliance_status;
    d.reliance_after = y.reliance_status;
    d.regressed = d.item_score_delta < 0.0 || (d.consensus_before && !d.consensus_after) ||
                  (d.reliance_before && !d.reliance_after);
    if (d.regressed) ++cmp.regressed_count;
    cmp.items.push_back(d);
  }
  for (std::size_t j = 0; j < a.criterion_collectives.size() && j < b.criterion_collectives.size();
       ++j) {
    cmp.criterion_deltas.push_back(delta_inv(b.criterion_collectives[j]) -
                                   delta_inv(a.criterion_collectives[j]));
  }
  cmp.questionnaire_score_delta = delta_inv(b.questionnaire_score) - delta_inv(a.questionnaire_score);
  return cmp;
}

std::vector<SweepPoint> epsilon_sweep(std::span<const AssessmentMatrix> matrices,
                                      const PanelConfiguration& panel,
                                      const ExtendedHierarchy& elh,
                                      std::span<const double> epsilons,
                                      double consensus_threshold) {
  for (double e : epsilons) check_epsilon(e);
  std::vector<SweepPoint> points;
  points.reserve(epsilons.size());
  const RoundReport* first = nullptr;
  RoundReport baseline;
  for (double e : epsilons) {
    RoundReport report = evaluate_round(matrices, panel, elh, {e, consensus_threshold});
    if (first == nullptr) {
      baseline = report;
      first = &baseline;
    } else {
      for (std::size_t r = 0; r < report.items.size(); ++r) {
        const ItemResult& x = first->items[r];
        const ItemResult& y = report.items[r];
        if (x.consensus_index != y.consensus_index || x.consensus_status != y.consensus_status ||
            !(x.item_score == y.item_score)) {
          throw std::logic_error(
              fmt::format("item {} changed consensus or score under epsilon {}", y.item_id, e));
        }
      }
    }
    SweepPoint pt;
    pt.epsilon = e;
    pt.item_count = report.items.size();
    for (const auto& it : report.items) {
      pt.reliable_items += it.reliance_status ? 1 : 0;
      pt.consensual_items += it.consensus_status ? 1 : 0;
    }
    points.push_back(pt);
  }
  return points;
}

}  // namespace tfld
