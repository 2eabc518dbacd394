#pragma once
//
// 2-tuple linguistic values over a multigranular extended linguistic hierarchy.
//
// A value (s_i, alpha) is stored as a label index plus a symbolic translation
// alpha in [-0.5, 0.5); its numeric position is beta = i + alpha. All
// computation is symbolic on indices, which assumes triangular, uniformly
// distributed label semantics.
//

#include <span>
#include <string>
#include <vector>

namespace tfld {

// One term set S^n of the hierarchy. Granularity is odd and >= 3.
class TermSetLevel {
 public:
  // Label names default to the built-in names for 3/5/7 and "s<i>" otherwise.
  TermSetLevel(int level_index, int granularity, std::vector<std::string> label_names = {});

  int level_index() const noexcept { return level_index_; }
  int granularity() const noexcept { return granularity_; }
  int max_index() const noexcept { return granularity_ - 1; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  const std::string& label_name(int index) const;

  friend bool operator==(const TermSetLevel& a, const TermSetLevel& b) {
    return a.granularity_ == b.granularity_;
  }

 private:
  int level_index_;
  int granularity_;
  std::vector<std::string> label_names_;
};

// Display names used when none are configured. Non-normative for S^7.
std::vector<std::string> default_label_names(int granularity);

class TwoTuple {
 public:
  // (s_0, 0) on S^3.
  TwoTuple() = default;
  // Checks 0 <= index <= granularity-1, alpha in [-0.5, 0.5) and beta in range.
  TwoTuple(int label_index, double alpha, int granularity);

  int label_index() const noexcept { return label_index_; }
  double alpha() const noexcept { return alpha_; }
  int granularity() const noexcept { return granularity_; }
  int max_index() const noexcept { return granularity_ - 1; }
  double beta() const noexcept { return label_index_ + alpha_; }

  friend bool operator==(const TwoTuple&, const TwoTuple&) = default;

 private:
  int label_index_ = 0;
  double alpha_ = 0.0;
  int granularity_ = 3;
};

// (s_i, 0) at `level`.
TwoTuple make_two_tuple(int label_index, const TermSetLevel& level);

// beta = i + alpha.
double delta_inv(const TwoTuple& value) noexcept;

// i = round(beta) with ties rounded up, alpha = beta - i. delta_inv of the
// result reproduces beta bit-for-bit.
TwoTuple delta(double beta, const TermSetLevel& level);
TwoTuple delta(double beta, int granularity);

// Normalized weighted mean of the betas. The result is kept inside
// [min beta, max beta] of the inputs so rounding noise never leaves the hull.
TwoTuple weighted_extended_mean(std::span<const TwoTuple> values, std::span<const double> weights);

// Plain mean (uniform weights).
TwoTuple extended_mean(std::span<const TwoTuple> values);

// Linear rescale of beta from the value's level to `target`. Works upwards
// (unification) and downwards (re-translation).
TwoTuple transform(const TwoTuple& value, const TermSetLevel& target);
TwoTuple transform(const TwoTuple& value, int target_granularity);

class ExtendedHierarchy {
 public:
  ExtendedHierarchy(std::vector<TermSetLevel> levels, TermSetLevel star_level);

  const std::vector<TermSetLevel>& levels() const noexcept { return levels_; }
  const TermSetLevel& star_level() const noexcept { return star_; }
  bool contains(int granularity) const noexcept;
  // Throws ConfigurationError when no level has this granularity.
  const TermSetLevel& level(int granularity) const;

 private:
  std::vector<TermSetLevel> levels_;
  TermSetLevel star_;
};

// Star granularity is lcm(g_1 - 1, ..., g_h - 1) + 1.
ExtendedHierarchy build_elh(std::span<const int> granularities);

// The {3, 5, 7} hierarchy with S^13 on top.
const ExtendedHierarchy& default_hierarchy();

// "(s5, -0.369)"
std::string format_two_tuple(const TwoTuple& value, int decimals = 3);

}  // namespace tfld
