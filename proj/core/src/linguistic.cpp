#include "tfld/linguistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tfld/error.hpp"

namespace tfld {

namespace {

void check_granularity(int granularity) {
  if (granularity < 3 || granularity % 2 == 0) {
    throw ConfigurationError(
        fmt::format("granularity {} is invalid: term sets need an odd number of labels >= 3",
                    granularity));
  }
}

}  // namespace

std::vector<std::string> default_label_names(int granularity) {
  switch (granularity) {
    case 3:
      return {"Bad", "Fair", "Good"};
    case 5:
      return {"Very bad", "Bad", "Fair", "Good", "Very good"};
    case 7:
      return {"Unacceptable", "Dreadful", "Incorrect", "Moderate",
              "Correct",      "Very correct", "Excellent"};
    default: {
      std::vector<std::string> names;
      names.reserve(static_cast<std::size_t>(std::max(granularity, 0)));
      for (int i = 0; i < granularity; ++i) names.push_back(fmt::format("s{}", i));
      return names;
    }
  }
}

TermSetLevel::TermSetLevel(int level_index, int granularity, std::vector<std::string> label_names)
    : level_index_(level_index), granularity_(granularity), label_names_(std::move(label_names)) {
  check_granularity(granularity_);
  if (level_index_ < 1) {
    throw ConfigurationError(fmt::format("level index {} must be >= 1", level_index_));
  }
  if (label_names_.empty()) label_names_ = default_label_names(granularity_);
  if (label_names_.size() != static_cast<std::size_t>(granularity_)) {
    throw ConfigurationError(fmt::format("S^{} needs {} label names, got {}", granularity_,
                                         granularity_, label_names_.size()));
  }
}

const std::string& TermSetLevel::label_name(int index) const {
  if (index < 0 || index > max_index()) {
    throw InputDomainError(fmt::format("label index {} out of range for S^{}", index, granularity_));
  }
  return label_names_[static_cast<std::size_t>(index)];
}

TwoTuple::TwoTuple(int label_index, double alpha, int granularity)
    : label_index_(label_index), alpha_(alpha), granularity_(granularity) {
  check_granularity(granularity);
  if (label_index < 0 || label_index > granularity - 1) {
    throw InputDomainError(
        fmt::format("label index {} out of range [0, {}] for S^{}", label_index, granularity - 1,
                    granularity));
  }
  if (!(alpha >= -0.5 && alpha < 0.5)) {
    throw InputDomainError(fmt::format("symbolic translation {} outside [-0.5, 0.5)", alpha));
  }
  const double b = label_index + alpha;
  if (b < 0.0 || b > granularity - 1) {
    throw InputDomainError(fmt::format("(s{}, {}) lies outside [0, {}]", label_index, alpha,
                                       granularity - 1));
  }
}

TwoTuple make_two_tuple(int label_index, const TermSetLevel& level) {
  if (label_index < 0 || label_index > level.max_index()) {
    throw InputDomainError(fmt::format("label index {} out of range [0, {}] for level {} (S^{})",
                                       label_index, level.max_index(), level.level_index(),
                                       level.granularity()));
  }
  return TwoTuple(label_index, 0.0, level.granularity());
}

double delta_inv(const TwoTuple& value) noexcept { return value.beta(); }

TwoTuple delta(double beta, int granularity) {
  check_granularity(granularity);
  const int max_index = granularity - 1;
  if (!(beta >= 0.0 && beta <= max_index)) {
    throw InputDomainError(fmt::format("beta {} outside [0, {}]", beta, max_index));
  }
  // std::round is half-away-from-zero, i.e. half-up on non-negative input.
  // beta - i is exact here (|beta - i| <= 0.5 and i is the nearest integer).
  const int index = static_cast<int>(std::round(beta));
  return TwoTuple(index, beta - index, granularity);
}

TwoTuple delta(double beta, const TermSetLevel& level) { return delta(beta, level.granularity()); }

TwoTuple weighted_extended_mean(std::span<const TwoTuple> values, std::span<const double> weights) {
  if (values.empty()) throw InputDomainError("weighted mean of an empty set");
  if (values.size() != weights.size()) {
    throw InputDomainError(fmt::format("{} values but {} weights", values.size(), weights.size()));
  }
  const int granularity = values.front().granularity();
  double weight_sum = 0.0;
  double weighted = 0.0;
  double lo = values.front().beta();
  double hi = lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].granularity() != granularity) {
      throw InputDomainError(fmt::format("cannot aggregate S^{} with S^{}",
                                         values[i].granularity(), granularity));
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw InputDomainError(fmt::format("weight {} at position {} is negative", weights[i], i));
    }
    const double b = values[i].beta();
    weight_sum += weights[i];
    weighted += b * weights[i];
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  if (!(weight_sum > 0.0)) throw InputDomainError("weights sum to zero");
  return delta(std::clamp(weighted / weight_sum, lo, hi), granularity);
}

TwoTuple extended_mean(std::span<const TwoTuple> values) {
  const std::vector<double> uniform(values.size(), 1.0);
  return weighted_extended_mean(values, uniform);
}

TwoTuple transform(const TwoTuple& value, int target_granularity) {
  check_granularity(target_granularity);
  const int target_max = target_granularity - 1;
  const double scaled = value.beta() * target_max / value.max_index();
  return delta(std::clamp(scaled, 0.0, static_cast<double>(target_max)), target_granularity);
}

TwoTuple transform(const TwoTuple& value, const TermSetLevel& target) {
  return transform(value, target.granularity());
}

ExtendedHierarchy::ExtendedHierarchy(std::vector<TermSetLevel> levels, TermSetLevel star_level)
    : levels_(std::move(levels)), star_(std::move(star_level)) {
  if (levels_.empty()) throw ConfigurationError("hierarchy needs at least one level");
  for (const auto& l : levels_) {
    if (star_.max_index() % l.max_index() != 0) {
      throw ConfigurationError(fmt::format("S^{} does not embed S^{} exactly", star_.granularity(),
                                           l.granularity()));
    }
  }
}

bool ExtendedHierarchy::contains(int granularity) const noexcept {
  if (star_.granularity() == granularity) return true;
  return std::any_of(levels_.begin(), levels_.end(),
                     [&](const TermSetLevel& l) { return l.granularity() == granularity; });
}

const TermSetLevel& ExtendedHierarchy::level(int granularity) const {
  for (const auto& l : levels_) {
    if (l.granularity() == granularity) return l;
  }
  if (star_.granularity() == granularity) return star_;
  throw ConfigurationError(fmt::format("S^{} is not part of the hierarchy", granularity));
}

ExtendedHierarchy build_elh(std::span<const int> granularities) {
  if (granularities.empty()) throw ConfigurationError("hierarchy needs at least one level");
  std::vector<TermSetLevel> levels;
  levels.reserve(granularities.size());
  long long lcm = 1;
  for (std::size_t i = 0; i < granularities.size(); ++i) {
    const int g = granularities[i];
    check_granularity(g);
    for (std::size_t j = 0; j < i; ++j) {
      if (granularities[j] == g) {
        throw ConfigurationError(fmt::format("granularity {} listed twice", g));
      }
    }
    levels.emplace_back(static_cast<int>(i) + 1, g);
    lcm = std::lcm(lcm, static_cast<long long>(g - 1));
    if (lcm > 1'000'000) throw ConfigurationError("unification level is too fine");
  }
  const int star_level_index = static_cast<int>(levels.size()) + 1;
  TermSetLevel star(star_level_index, static_cast<int>(lcm) + 1);
  return ExtendedHierarchy(std::move(levels), std::move(star));
}

const ExtendedHierarchy& default_hierarchy() {
  static const ExtendedHierarchy elh = [] {
    const int g[] = {3, 5, 7};
    return build_elh(g);
  }();
  return elh;
}

std::string format_two_tuple(const TwoTuple& value, int decimals) {
  std::string alpha = fmt::format("{:.{}f}", value.alpha(), decimals);
  if (alpha.front() == '-' && alpha.find_first_not_of("-0.") == std::string::npos) {
    alpha.erase(0, 1);
  }
  return fmt::format("(s{}, {})", value.label_index(), alpha);
}

}  // namespace tfld
