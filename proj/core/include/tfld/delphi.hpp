#pragma once
//
// Per-item multi-expert multi-criteria evaluation and questionnaire roll-up.
//
// Each questionnaire item is solved independently: judges' labels are lifted
// to 2-tuples, unified on the star level of the hierarchy, aggregated across
// judges with the item's dimension weights (one collective per criterion),
// aggregated again across criteria with uniform weights, and finally
// re-expressed on the output level (the finest user level, S^7 by default).
// Consensus compares every judge against the per-criterion collectives;
// reliance counts criteria whose collective clears delta_star * epsilon.
//

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfld/linguistic.hpp"

namespace tfld {

enum class Criterion { Clarity = 0, Writing = 1, Presence = 2, AnsweringScale = 3 };

inline constexpr std::size_t kCriteriaCount = 4;
inline constexpr std::array<Criterion, kCriteriaCount> kCriteria = {
    Criterion::Clarity, Criterion::Writing, Criterion::Presence, Criterion::AnsweringScale};

std::string_view criterion_name(Criterion c) noexcept;

// Dimension weight rows must sum to 1 within this tolerance (3-decimal sheets).
inline constexpr double kWeightSumTolerance = 1e-3;

// A row of 3-decimal weights summing to 0.999 lands a few ulps outside the
// tolerance in binary floating point, hence the extra slack.
inline bool weight_sum_acceptable(double sum) noexcept {
  return std::abs(sum - 1.0) <= kWeightSumTolerance + 1e-9;
}
// Slack applied to the >= comparisons behind CS and RS.
inline constexpr double kDecisionTolerance = 1e-9;
inline constexpr double kDefaultEpsilon = 0.75;
inline constexpr double kDefaultConsensusThreshold = 0.5;
inline constexpr std::size_t kMinimumPanelSize = 3;

// One item's raw panel input. labels[i][j] is judge i's label index for
// criterion j on that judge's own term set.
struct AssessmentMatrix {
  int item_id = 0;
  std::vector<std::array<int, kCriteriaCount>> labels;
  std::vector<double> relevance;

  std::size_t judge_count() const noexcept { return labels.size(); }
};

struct DimensionRange {
  std::string id;
  int first_item = 0;
  int last_item = 0;
  std::vector<double> weights;

  bool contains(int item_id) const noexcept { return item_id >= first_item && item_id <= last_item; }
};

struct PanelConfiguration {
  std::vector<std::string> judge_ids;
  std::vector<int> judge_levels;  // granularity chosen by each judge
  std::vector<DimensionRange> dimensions;

  std::size_t judge_count() const noexcept { return judge_levels.size(); }

  // Throws ConfigurationError on broken invariants. Soft problems (a panel
  // smaller than three judges) come back as warnings.
  std::vector<std::string> validate(int item_count, const ExtendedHierarchy& elh) const;

  const DimensionRange& dimension_for(int item_id) const;

  // Single dimension over [1, item_count] with weights 1/p.
  static PanelConfiguration uniform(std::vector<int> judge_levels, int item_count);
};

struct EvaluationOptions {
  double epsilon = kDefaultEpsilon;
  double consensus_threshold = kDefaultConsensusThreshold;
};

using StarGrid = std::vector<std::vector<TwoTuple>>;

struct ItemResult {
  int item_id = 0;
  std::vector<TwoTuple> criterion_collectives;  // Y_r, star level
  double relevance_collective = 0.0;            // W^r
  TwoTuple overall;                             // Z_r, star level
  TwoTuple item_score;                          // IS_r, output level
  std::vector<double> separations;              // rho, one per judge
  double consensus_index = 0.0;                 // clamped to [0, 1]
  double raw_consensus_index = 0.0;             // before clamping
  bool consensus_status = false;
  double reliance_index = 0.0;
  bool reliance_status = false;
};

struct RoundReport {
  int round_number = 1;
  double epsilon = kDefaultEpsilon;
  double consensus_threshold = kDefaultConsensusThreshold;
  std::vector<ItemResult> items;
  // CC, CW, CP, CAS on the output level.
  std::vector<TwoTuple> criterion_collectives;
  TwoTuple questionnaire_score;

  std::vector<double> average_relevance() const;
  const ItemResult& item(int item_id) const;
};

// X''_r: every label lifted to (s, 0) and transformed to the star level.
StarGrid unify_matrix(const AssessmentMatrix& matrix, const PanelConfiguration& panel,
                      const ExtendedHierarchy& elh);

struct CriteriaAggregate {
  std::vector<TwoTuple> collectives;
  double relevance = 0.0;
};

// Weighted mean over judges for every criterion column, plus the
// weight-normalized relevance collective.
CriteriaAggregate aggregate_criteria(const StarGrid& unified, const AssessmentMatrix& matrix,
                                     std::span<const double> judge_weights);

TwoTuple collective_score(std::span<const TwoTuple> criterion_collectives);

TwoTuple item_score(const TwoTuple& overall, const TermSetLevel& output_level);

// Euclidean distance in beta between each judge's row and the collectives.
std::vector<double> separations(const StarGrid& unified, std::span<const TwoTuple> collectives);

struct ConsensusResult {
  double index = 0.0;
  double raw_index = 0.0;
  bool status = false;
};

ConsensusResult consensus(std::span<const double> separations, std::span<const double> judge_weights,
                          int star_max_index, double threshold = kDefaultConsensusThreshold);

struct RelianceResult {
  double index = 0.0;
  bool status = false;
};

RelianceResult reliance(std::span<const TwoTuple> collectives, double epsilon);

ItemResult evaluate_item(const AssessmentMatrix& matrix, const PanelConfiguration& panel,
                         const ExtendedHierarchy& elh, const EvaluationOptions& options = {});

RoundReport evaluate_round(std::span<const AssessmentMatrix> matrices,
                           const PanelConfiguration& panel, const ExtendedHierarchy& elh,
                           const EvaluationOptions& options = {}, int round_number = 1);

struct TrimResult {
  std::vector<int> retained;
  std::vector<int> hidden;

  std::size_t hidden_count() const noexcept { return hidden.size(); }
};

// Hides items whose item-score label index is strictly below `threshold`.
TrimResult trim(const RoundReport& report, int threshold);

struct ItemDelta {
  int item_id = 0;
  double item_score_delta = 0.0;  // beta on the output level
  double consensus_delta = 0.0;
  double reliance_delta = 0.0;
  double relevance_delta = 0.0;
  bool consensus_before = false;
  bool consensus_after = false;
  bool reliance_before = false;
  bool reliance_after = false;
  bool regressed = false;
};

struct RoundComparison {
  int round_a = 0;
  int round_b = 0;
  std::vector<ItemDelta> items;
  std::vector<double> criterion_deltas;  // CC, CW, CP, CAS beta deltas
  double questionnaire_score_delta = 0.0;
  std::size_t regressed_count = 0;
};

// b minus a, item by item. Both reports must cover the same item ids.
RoundComparison compare_rounds(const RoundReport& a, const RoundReport& b);

struct SweepPoint {
  double epsilon = 0.0;
  std::size_t reliable_items = 0;
  std::size_t consensual_items = 0;
  std::size_t item_count = 0;
};

std::vector<SweepPoint> epsilon_sweep(std::span<const AssessmentMatrix> matrices,
                                      const PanelConfiguration& panel,
                                      const ExtendedHierarchy& elh,
                                      std::span<const double> epsilons,
                                      double consensus_threshold = kDefaultConsensusThreshold);

void check_epsilon(double epsilon);

}  // namespace tfld
