#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmtree/tree.hpp"

namespace mmtree {

struct ForestConfig {
  std::size_t n_trees = 100;
  /// Template for every tree; its policy, m_try and seed are overridden.
  GrowConfig tree;
  std::size_t m_try = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 1;
};

struct ForestModel {
  ForestConfig config;
  Task task = Task::regression;
  std::size_t n_features = 0;
  std::vector<TreeModel> trees;
  /// Row indices each tree was trained on (with repeats under bootstrap).
  std::vector<std::vector<std::uint32_t>> samples;
};

ForestModel train_forest(const Dataset& data, const ForestConfig& cfg);
/// Mean tree prediction. For classification forests: mean smoothed log-odds.
double predict_forest(const ForestModel& model, std::span<const double> x);
std::vector<double> predict_forest(const ForestModel& model, const Dataset& data);
/// Classification forests: sign of the mean log-odds (+1 at 0).
int classify_forest(const ForestModel& model, std::span<const double> x);

std::string serialize(const ForestModel& model);
ForestModel load_forest(const std::string& json_text);

}  // namespace mmtree
