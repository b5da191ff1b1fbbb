#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmtree/dataset.hpp"
#include "mmtree/rng.hpp"

namespace mmtree {

enum class SplitCriterion {
  variance,
  minimax,
  cyclic_minimax,
  one_sided_min,  // "C1" surrogate: minimize the left child's risk
  one_sided_max,  // "C2" surrogate: minimize the right child's risk
  random_uniform,
  random_observed,
  entropy_sum,
  entropy_minimax,
  entropy_cyclic_minimax,
};

std::string_view to_string(SplitCriterion c);
SplitCriterion parse_criterion(std::string_view name);
bool is_entropy(SplitCriterion c);
bool is_cyclic(SplitCriterion c);
bool is_random(SplitCriterion c);
/// Throws ConfigError when the criterion cannot be used for the task.
void check_compatible(SplitCriterion c, Task task);

struct SplitDecision {
  std::size_t feature = 0;
  double threshold = 0.0;
  double left_risk = 0.0;
  double right_risk = 0.0;
  double criterion_value = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

/// Sufficient statistics of a node. Risk is unnormalized: SSE for regression,
/// count * h(pos/count) for classification.
struct NodeStats {
  std::size_t count = 0;
  double sum_y = 0.0;
  double sum_y_sq = 0.0;
  std::size_t pos_count = 0;
  double risk = 0.0;

  static NodeStats of(const NodeView& node);
  static NodeStats of(const Dataset& data, std::span<const std::uint32_t> members);
  double mean() const { return sum_y / static_cast<double>(count); }
};

/// Natural-log binary entropy with h(0) = h(1) = 0.
double entropy(double p);
/// count * h(pos / count), computed as n log n - k log k - (n-k) log(n-k).
double entropy_risk(std::size_t count, std::size_t pos);

std::vector<double> candidate_thresholds(const NodeView& node, std::size_t feature);

/// Child risks at every candidate threshold of one feature.
///
/// left[c] is non-decreasing and right[c] non-increasing in c exactly (not
/// just up to rounding), which is what lets minimax_search bisect.
struct RiskProfile {
  std::vector<double> thresholds;
  std::vector<double> left;
  std::vector<double> right;
  std::vector<std::size_t> left_count;
  std::size_t size = 0;

  std::size_t candidates() const { return thresholds.size(); }
};

RiskProfile risk_profile(const NodeView& node, std::size_t feature);

enum class ScanMode { sum, max, left_only, right_only };

struct ScanResult {
  double threshold = 0.0;
  double left_risk = 0.0;
  double right_risk = 0.0;
  double criterion_value = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

/// Thrown by scan_feature / minimax_search when no admissible threshold exists.
class Unsplittable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive left-to-right scan. Only thresholds leaving at least `min_child`
/// samples on each side are admissible. Ties go to the smallest threshold.
ScanResult scan_feature(const NodeView& node, std::size_t feature, ScanMode mode,
                        std::size_t min_child = 1);
ScanResult scan_profile(const RiskProfile& profile, ScanMode mode, std::size_t min_child = 1);

/// Minimizes max(left, right) by bisecting for the crossing of the two
/// monotone child-risk sequences; O(log m) profile lookups for m candidates.
/// Agrees exactly with scan_feature(node, feature, ScanMode::max).
ScanResult minimax_search(const NodeView& node, std::size_t feature);
ScanResult minimax_profile(const RiskProfile& profile);

/// Optimizes the criterion over allowed features. Cyclic criteria ignore
/// `allowed_features` and use feature node.depth() % d. Returns nullopt when no
/// usable feature is splittable on the node. `min_leaf` is the child-size guard
/// of the one-sided criteria.
std::optional<SplitDecision> best_split(const NodeView& node, SplitCriterion criterion,
                                        std::span<const std::size_t> allowed_features,
                                        Stream& rng, std::size_t min_leaf = 1);

}  // namespace mmtree
