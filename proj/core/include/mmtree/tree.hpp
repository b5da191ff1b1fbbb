#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mmtree/dataset.hpp"
#include "mmtree/splitting.hpp"

namespace mmtree {

enum class FeaturePolicy { all, fixed, random };

std::string_view to_string(FeaturePolicy p);
FeaturePolicy parse_feature_policy(std::string_view name);

struct GrowConfig {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  SplitCriterion criterion = SplitCriterion::minimax;
  FeaturePolicy policy = FeaturePolicy::all;
  /// Used when policy == fixed.
  std::vector<std::size_t> features;
  /// Used when policy == random.
  std::size_t m_try = 1;
  std::uint64_t seed = 0;
};

/// Throws ConfigError if `cfg` is unusable on data with `n_features` columns.
void validate(const GrowConfig& cfg, std::size_t n_features);

struct TreeNode {
  static constexpr std::int32_t npos = -1;

  std::int32_t left = npos;
  std::int32_t right = npos;
  std::size_t feature = 0;
  double threshold = 0.0;
  /// Mean target of the node's sample (a leaf's prediction).
  double value = 0.0;
  std::size_t count = 0;
  std::size_t pos_count = 0;
  /// Unnormalized node risk (SSE or count * entropy).
  double risk = 0.0;
  /// Number of ancestors.
  std::size_t depth = 0;
  /// Partition level at which the node was split; for leaves, the level at which
  /// it stopped.
  std::size_t level = 0;

  bool is_leaf() const { return left == npos; }
  /// Smoothed log-odds log(eta / (1 - eta)) with eta = (pos + 1/2) / (count + 1).
  double log_odds() const;
  /// +1 iff pos / count >= 1/2.
  int label() const { return 2 * pos_count >= count ? 1 : -1; }
};

struct Classification {
  int label = 1;
  double log_odds = 0.0;
};

class TreeModel {
 public:
  Task task = Task::regression;
  std::size_t n_features = 0;
  std::size_t n_samples = 0;
  GrowConfig config;
  /// nodes[0] is the root.
  std::vector<TreeNode> nodes;
  /// (1/N) * total cell risk of the depth-k partition, k = 0..K.
  std::vector<double> risk_trace;
  /// (1/N) * largest cell risk of the depth-k partition.
  std::vector<double> max_risk_trace;
  /// Features split on at each level, in breadth-first node order.
  std::vector<std::vector<std::size_t>> split_features;

  std::size_t leaf_index(std::span<const double> x) const;
  /// Prediction of the depth-k partition: the mean of the cell containing x.
  double predict_at_depth(std::span<const double> x, std::size_t k) const;
  std::size_t leaf_count() const;
};

TreeModel grow(const Dataset& data, const GrowConfig& cfg);
double predict(const TreeModel& model, std::span<const double> x);
std::vector<double> predict(const TreeModel& model, const Dataset& data);
Classification classify(const TreeModel& model, std::span<const double> x);
const std::vector<double>& risk_trace(const TreeModel& model);

struct LeafReport {
  std::size_t depth = 0;
  std::size_t count = 0;
  double risk = 0.0;
  std::vector<double> lower;  // -inf where unbounded
  std::vector<double> upper;  // +inf where unbounded
};

struct PartitionReport {
  std::vector<LeafReport> leaves;
  std::size_t leaf_count = 0;
  double mean_leaf_size = 0.0;
  /// Population standard deviation (divides by the leaf count).
  double sd_leaf_size = 0.0;
};

PartitionReport partition_report(const TreeModel& model);

std::string serialize(const TreeModel& model);
TreeModel load_tree(const std::string& json_text);

}  // namespace mmtree
