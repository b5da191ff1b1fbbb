#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mmtree/error.hpp"
#include "mmtree/forest.hpp"
#include "mmtree/synthetic.hpp"

using namespace mmtree;

namespace {

SyntheticData asbp(std::size_t n, std::uint64_t seed, double sigma = 0.0) {
  GeneratorSpec spec;
  spec.generator = "asbp";
  spec.n = n;
  spec.d = 2;
  spec.sigma = sigma;
  return gen_synthetic(spec, seed);
}

double mse(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

TEST(Forest, SingleTreeWithoutBootstrapMatchesTree) {
  const auto g = asbp(500, 1, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.m_try = 2;
  cfg.tree.max_depth = 6;
  const auto f = train_forest(g.data, cfg);
  GrowConfig tc = cfg.tree;
  tc.policy = FeaturePolicy::random;
  tc.m_try = 2;
  const auto t = grow(g.data, tc);
  EXPECT_EQ(predict_forest(f, g.data), predict(t, g.data));
}

TEST(Forest, JensenBound) {
  const auto g = asbp(800, 2, 0.2);
  const auto test = asbp(500, 3, 0.2);
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.tree.max_depth = 6;
  cfg.seed = 9;
  const auto f = train_forest(g.data, cfg);
  const std::vector<double> y(test.data.targets().begin(), test.data.targets().end());
  const double forest_mse = mse(predict_forest(f, test.data), y);
  double mean_tree = 0.0;
  for (const auto& t : f.trees) mean_tree += mse(predict(t, test.data), y);
  mean_tree /= static_cast<double>(f.trees.size());
  EXPECT_LE(forest_mse, mean_tree + 1e-9);
}

TEST(Forest, ParallelEqualsSequential) {
  const auto g = asbp(600, 4, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 12;
  cfg.tree.max_depth = 5;
  cfg.seed = 123;
  const std::string seq = serialize(train_forest(g.data, cfg));
  cfg.threads = 4;
  const std::string par = serialize(train_forest(g.data, cfg));
  EXPECT_EQ(seq, par);
  cfg.threads = 3;
  EXPECT_EQ(serialize(train_forest(g.data, cfg)), seq);
}

TEST(Forest, MinimaxAndCyclicCoincideAtMtryOne) {
  const auto g = asbp(600, 5, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 8;
  cfg.tree.max_depth = 6;
  cfg.seed = 5;
  cfg.tree.criterion = SplitCriterion::minimax;
  const auto a = train_forest(g.data, cfg);
  cfg.tree.criterion = SplitCriterion::cyclic_minimax;
  const auto b = train_forest(g.data, cfg);
  ASSERT_EQ(a.trees.size(), b.trees.size());
  for (std::size_t i = 0; i < a.trees.size(); ++i) {
    EXPECT_EQ(a.trees[i].nodes.size(), b.trees[i].nodes.size());
    for (std::size_t k = 0; k < a.trees[i].nodes.size(); ++k) {
      EXPECT_EQ(a.trees[i].nodes[k].feature, b.trees[i].nodes[k].feature);
      EXPECT_EQ(a.trees[i].nodes[k].threshold, b.trees[i].nodes[k].threshold);
    }
  }
  EXPECT_EQ(predict_forest(a, g.data), predict_forest(b, g.data));
}

TEST(Forest, CyclicNeedsFullOrUnitMtry) {
  GeneratorSpec spec;
  spec.generator = "asbp";
  spec.n = 100;
  spec.d = 3;
  const auto g = gen_synthetic(spec, 1);
  ForestConfig cfg;
  cfg.n_trees = 2;
  cfg.tree.criterion = SplitCriterion::cyclic_minimax;
  cfg.m_try = 2;
  EXPECT_THROW(train_forest(g.data, cfg), ConfigError);
  cfg.m_try = 3;
  EXPECT_NO_THROW(train_forest(g.data, cfg));
  cfg.m_try = 0;
  EXPECT_THROW(train_forest(g.data, cfg), ConfigError);
  cfg.m_try = 1;
  cfg.n_trees = 0;
  EXPECT_THROW(train_forest(g.data, cfg), ConfigError);
}

TEST(Forest, BootstrapUniqueFraction) {
  const auto g = asbp(1000, 6);
  ForestConfig cfg;
  cfg.n_trees = 200;
  cfg.tree.max_depth = 0;
  cfg.seed = 31;
  const auto f = train_forest(g.data, cfg);
  double frac = 0.0;
  for (const auto& s : f.samples) {
    ASSERT_EQ(s.size(), 1000u);
    frac += static_cast<double>(std::set<std::uint32_t>(s.begin(), s.end()).size()) / 1000.0;
  }
  frac /= 200.0;
  EXPECT_NEAR(frac, 1.0 - std::exp(-1.0), 0.02);
}

TEST(Forest, AveragesTreePredictions) {
  const auto g = asbp(300, 7, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.tree.max_depth = 4;
  const auto f = train_forest(g.data, cfg);
  const auto row = g.data.row(3);
  double mean = 0.0;
  for (const auto& t : f.trees) mean += predict(t, row);
  EXPECT_NEAR(predict_forest(f, row), mean / 5.0, 1e-12);
}

TEST(Forest, ClassificationAveragesLogOdds) {
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = static_cast<double>(i) / 200.0;
    y[i] = x[i] < 0.5 ? -1.0 : 1.0;
  }
  const Dataset d({x}, y, Task::classification);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.tree.max_depth = 4;
  cfg.tree.criterion = SplitCriterion::entropy_minimax;
  const auto f = train_forest(d, cfg);
  const double lo = 0.1, hi = 0.9;
  EXPECT_EQ(classify_forest(f, std::span(&lo, 1)), -1);
  EXPECT_EQ(classify_forest(f, std::span(&hi, 1)), 1);
}

TEST(Forest, JsonRoundTrip) {
  const auto g = asbp(300, 8, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 4;
  cfg.tree.max_depth = 4;
  cfg.seed = 2;
  const auto f = train_forest(g.data, cfg);
  const std::string a = serialize(f);
  const auto b = load_forest(a);
  EXPECT_EQ(serialize(b), a);
  EXPECT_EQ(predict_forest(b, g.data), predict_forest(f, g.data));
}

TEST(Forest, SeedChangesModel) {
  const auto g = asbp(300, 9, 0.1);
  ForestConfig cfg;
  cfg.n_trees = 3;
  cfg.seed = 1;
  const auto a = serialize(train_forest(g.data, cfg));
  cfg.seed = 2;
  EXPECT_NE(a, serialize(train_forest(g.data, cfg)));
}
