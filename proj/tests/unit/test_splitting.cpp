#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mmtree/error.hpp"
#include "mmtree/splitting.hpp"
#include "mmtree/synthetic.hpp"
#include "oracles.hpp"

using namespace mmtree;

namespace {

Dataset one_d(std::vector<double> x, std::vector<double> y, Task task = Task::regression) {
  return Dataset({std::move(x)}, std::move(y), task);
}

// Random 1-D node with duplicate-prone x.
Dataset random_node(Stream& s, Task task = Task::regression) {
  const std::size_t n = 2 + s.index(80);
  std::vector<double> x(n), y(n);
  const std::size_t levels = 1 + s.index(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(s.index(levels));
    y[i] = task == Task::regression ? s.normal() * 3.0 : (s.uniform() < 0.4 ? 1.0 : -1.0);
  }
  x[0] = 0.0;
  x[1] = 1.0;  // at least one threshold
  return one_d(x, y, task);
}

}  // namespace

TEST(Splitting, CandidateThresholds) {
  const Dataset a = one_d({0, 1, 2}, {0, 0, 0});
  EXPECT_EQ(candidate_thresholds(NodeView::root(a), 0), (std::vector<double>{0.5, 1.5}));
  const Dataset b = one_d({3, 3, 3}, {0, 1, 2});
  EXPECT_TRUE(candidate_thresholds(NodeView::root(b), 0).empty());
  const Dataset c = one_d({1, 1, 2}, {0, 1, 2});
  EXPECT_EQ(candidate_thresholds(NodeView::root(c), 0), (std::vector<double>{1.5}));
  EXPECT_THROW(candidate_thresholds(NodeView::root(c), 3), std::out_of_range);
}

TEST(Splitting, ScanSumPrefersSmallestTiedThreshold) {
  const Dataset d = one_d({0, 1, 2, 3}, {0, 4, 5, 9});
  const auto r = scan_feature(NodeView::root(d), 0, ScanMode::sum);
  EXPECT_EQ(r.threshold, 0.5);
  EXPECT_DOUBLE_EQ(r.criterion_value, 14.0);
  EXPECT_DOUBLE_EQ(r.left_risk, 0.0);
  EXPECT_DOUBLE_EQ(r.right_risk, 14.0);
}

TEST(Splitting, ScanMaxBalancesRisks) {
  const Dataset d = one_d({0, 1, 2, 3}, {0, 4, 5, 9});
  const auto r = scan_feature(NodeView::root(d), 0, ScanMode::max);
  EXPECT_EQ(r.threshold, 1.5);
  EXPECT_DOUBLE_EQ(r.criterion_value, 8.0);
  EXPECT_DOUBLE_EQ(r.left_risk, 8.0);
  EXPECT_DOUBLE_EQ(r.right_risk, 8.0);
  const Dataset step = one_d({1, 2, 3, 4}, {0, 0, 10, 10});
  const auto s = scan_feature(NodeView::root(step), 0, ScanMode::max);
  EXPECT_EQ(s.threshold, 2.5);
  EXPECT_EQ(s.criterion_value, 0.0);
}

TEST(Splitting, MinimaxSearchExamples) {
  const Dataset d = one_d({0, 1, 2, 3}, {0, 4, 5, 9});
  const auto r = minimax_search(NodeView::root(d), 0);
  EXPECT_EQ(r.threshold, 1.5);
  EXPECT_DOUBLE_EQ(r.criterion_value, 8.0);
  const Dataset c = one_d({0, 1, 2, 3, 4}, {2, 2, 2, 2, 2});
  const auto z = minimax_search(NodeView::root(c), 0);
  EXPECT_EQ(z.criterion_value, 0.0);
  EXPECT_EQ(z.threshold, 0.5);
  EXPECT_THROW(minimax_search(NodeView::root(one_d({1, 1}, {0, 1})), 0), Unsplittable);
}

TEST(Splitting, ScanMatchesBruteForce) {
  Stream s(21);
  for (int rep = 0; rep < 300; ++rep) {
    const Dataset d = random_node(s);
    const auto node = NodeView::root(d);
    const std::vector<double> x(d.feature(0).begin(), d.feature(0).end());
    const std::vector<double> y(d.targets().begin(), d.targets().end());
    const auto cands = oracle::enumerate_sse(x, y);
    const auto prof = risk_profile(node, 0);
    ASSERT_EQ(prof.candidates(), cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) {
      ASSERT_EQ(prof.thresholds[c], cands[c].threshold);
      ASSERT_NEAR(prof.left[c], cands[c].left, 1e-9 * (1 + cands[c].left));
      ASSERT_NEAR(prof.right[c], cands[c].right, 1e-9 * (1 + cands[c].right));
    }
    // Smallest-threshold argmin of the brute-force sum.
    std::size_t best = 0;
    for (std::size_t c = 1; c < cands.size(); ++c)
      if (cands[c].left + cands[c].right < cands[best].left + cands[best].right - 1e-9) best = c;
    const auto r = scan_feature(node, 0, ScanMode::sum);
    ASSERT_NEAR(r.criterion_value, cands[best].left + cands[best].right, 1e-8 * (1 + r.criterion_value));
  }
}

TEST(Splitting, MinimaxSearchEqualsExhaustiveScan) {
  Stream s(22);
  for (int rep = 0; rep < 2000; ++rep) {
    const Task task = rep % 2 ? Task::regression : Task::classification;
    const Dataset d = random_node(s, task);
    const auto node = NodeView::root(d);
    const auto a = minimax_search(node, 0);
    const auto b = scan_feature(node, 0, ScanMode::max);
    ASSERT_EQ(a.criterion_value, b.criterion_value);
    ASSERT_EQ(a.threshold, b.threshold);
  }
}

TEST(Splitting, ProfilesAreMonotone) {
  Stream s(23);
  for (int rep = 0; rep < 500; ++rep) {
    const Dataset d = random_node(s, rep % 2 ? Task::regression : Task::classification);
    const auto p = risk_profile(NodeView::root(d), 0);
    for (std::size_t c = 1; c < p.candidates(); ++c) {
      ASSERT_LE(p.left[c - 1], p.left[c]);
      ASSERT_GE(p.right[c - 1], p.right[c]);
    }
  }
}

TEST(Splitting, Entropy) {
  EXPECT_NEAR(entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(entropy(0.0), 0.0);
  EXPECT_EQ(entropy(1.0), 0.0);
  EXPECT_NEAR(entropy(0.25), 0.562335, 1e-6);
  EXPECT_NEAR(entropy(0.25), -0.25 * std::log(0.25) - 0.75 * std::log(0.75), 1e-15);
  EXPECT_THROW(entropy(-0.1), std::domain_error);
  EXPECT_THROW(entropy(1.1), std::domain_error);
  EXPECT_NEAR(entropy_risk(8, 2), 8 * entropy(0.25), 1e-12);
}

TEST(Splitting, NodeStats) {
  const Dataset d = one_d({0, 1, 2, 3}, {0, 4, 5, 9});
  const auto s = NodeStats::of(NodeView::root(d));
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(s.sum_y, 18.0);
  EXPECT_EQ(s.sum_y_sq, 122.0);
  EXPECT_DOUBLE_EQ(s.risk, 41.0);
  const Dataset one = one_d({0}, {5});
  EXPECT_EQ(NodeStats::of(NodeView::root(one)).risk, 0.0);
  const Dataset cls = one_d({0, 1, 2, 3}, {1, 1, -1, 1}, Task::classification);
  const auto c = NodeStats::of(NodeView::root(cls));
  EXPECT_EQ(c.pos_count, 3u);
  EXPECT_NEAR(c.risk, 4 * entropy(0.75), 1e-12);
}

TEST(Splitting, IncrementalAgreesWithTwoPass) {
  Stream s(24);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + s.index(500);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = s.uniform();
      y[i] = 1e6 * (2 * s.uniform() - 1);
    }
    const Dataset d = one_d(x, y);
    const double r = NodeStats::of(NodeView::root(d)).risk;
    const double o = oracle::sse(y);
    ASSERT_GE(r, 0.0);
    ASSERT_NEAR(r, o, 1e-8 * o);
  }
}

TEST(Splitting, CyclicIgnoresQuality) {
  // Feature 1 separates perfectly, feature 0 is noise; cyclic at depth 0 uses feature 0.
  const Dataset d({{0, 1, 2, 3}, {0, 0, 1, 1}}, {0, 5, 0, 5}, Task::regression);
  Stream rng(1);
  const std::vector<std::size_t> all{0, 1};
  const auto c = best_split(NodeView::root(d), SplitCriterion::cyclic_minimax, all, rng);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->feature, 0u);
  const auto m = best_split(NodeView::of(d, {0, 1, 2, 3}, 1), SplitCriterion::cyclic_minimax, all, rng);
  EXPECT_EQ(m->feature, 1u);
}

TEST(Splitting, FeatureTiesGoToSmallerIndex) {
  const Dataset d({{0, 1, 2, 3}, {0, 1, 2, 3}}, {0, 0, 7, 7}, Task::regression);
  Stream rng(1);
  const std::vector<std::size_t> all{1, 0};
  for (auto c : {SplitCriterion::variance, SplitCriterion::minimax}) {
    const auto s = best_split(NodeView::root(d), c, all, rng);
    EXPECT_EQ(s->feature, 0u);
    EXPECT_EQ(s->threshold, 1.5);
    EXPECT_EQ(s->criterion_value, 0.0);
  }
}

TEST(Splitting, UnsplittableAndErrors) {
  const Dataset d({{1, 1, 1}, {2, 2, 2}}, {0, 1, 2}, Task::regression);
  Stream rng(1);
  const std::vector<std::size_t> all{0, 1};
  for (auto c : {SplitCriterion::variance, SplitCriterion::minimax, SplitCriterion::cyclic_minimax,
                 SplitCriterion::random_uniform, SplitCriterion::random_observed}) {
    EXPECT_FALSE(best_split(NodeView::root(d), c, all, rng));
  }
  EXPECT_THROW(best_split(NodeView::root(d), SplitCriterion::variance, {}, rng), ConfigError);
  EXPECT_THROW(best_split(NodeView::root(d), SplitCriterion::entropy_sum, all, rng), ConfigError);
  const Dataset cls = one_d({0, 1}, {1, -1}, Task::classification);
  const std::vector<std::size_t> f0{0};
  EXPECT_THROW(best_split(NodeView::root(cls), SplitCriterion::variance, f0, rng), ConfigError);
  EXPECT_TRUE(best_split(NodeView::root(cls), SplitCriterion::entropy_minimax, f0, rng));
}

TEST(Splitting, AsbpRootSplitsFirstCoordinate) {
  GeneratorSpec spec;
  spec.generator = "asbp";
  spec.n = 4096;
  spec.d = 2;
  const auto g = gen_synthetic(spec, 2024);
  Stream rng(1);
  const std::vector<std::size_t> all{0, 1};
  const auto s = best_split(NodeView::root(g.data), SplitCriterion::minimax, all, rng);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->feature, 0u);
}

TEST(Splitting, RandomBaselinesProduceValidSplits) {
  Stream s(25);
  for (int rep = 0; rep < 200; ++rep) {
    const Dataset d = random_node(s);
    const auto node = NodeView::root(d);
    const std::vector<std::size_t> f0{0};
    for (auto c : {SplitCriterion::random_uniform, SplitCriterion::random_observed}) {
      const auto dec = best_split(node, c, f0, s);
      ASSERT_TRUE(dec);
      ASSERT_GE(dec->left_count, 1u);
      ASSERT_GE(dec->right_count, 1u);
      ASSERT_EQ(dec->left_count + dec->right_count, node.size());
      std::size_t left = 0;
      for (std::size_t i = 0; i < d.n_samples(); ++i) left += d.x(0, i) < dec->threshold;
      ASSERT_EQ(left, dec->left_count);
    }
  }
}

TEST(Splitting, OneSidedRespectsGuard) {
  Stream s(26);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = s.normal();
  }
  const Dataset d = one_d(x, y);
  const std::vector<std::size_t> f0{0};
  const auto l = best_split(NodeView::root(d), SplitCriterion::one_sided_min, f0, s, 5);
  const auto r = best_split(NodeView::root(d), SplitCriterion::one_sided_max, f0, s, 5);
  ASSERT_TRUE(l && r);
  EXPECT_EQ(l->left_count, 5u);  // smallest left risk at the guard boundary
  EXPECT_EQ(r->right_count, 5u);
  EXPECT_EQ(l->criterion_value, l->left_risk);
  EXPECT_EQ(r->criterion_value, r->right_risk);
}

TEST(Splitting, ParseNames) {
  for (auto c : {SplitCriterion::variance, SplitCriterion::minimax, SplitCriterion::cyclic_minimax,
                 SplitCriterion::one_sided_min, SplitCriterion::one_sided_max, SplitCriterion::random_uniform,
                 SplitCriterion::random_observed, SplitCriterion::entropy_sum, SplitCriterion::entropy_minimax,
                 SplitCriterion::entropy_cyclic_minimax}) {
    EXPECT_EQ(parse_criterion(to_string(c)), c);
  }
  EXPECT_THROW(parse_criterion("gini"), ConfigError);
}

TEST(Splitting, SumBoundAndHalvingSlack) {
  Stream s(27);
  for (int rep = 0; rep < 1000; ++rep) {
    const Task task = rep % 2 ? Task::regression : Task::classification;
    const Dataset d = random_node(s, task);
    const auto node = NodeView::root(d);
    const double parent = NodeStats::of(node).risk;
    const auto prof = risk_profile(node, 0);
    for (std::size_t c = 0; c < prof.candidates(); ++c)
      ASSERT_LE(prof.left[c] + prof.right[c], parent * (1 + 1e-12) + 1e-12);
    // Largest run of tied x values.
    std::vector<double> x(d.feature(0).begin(), d.feature(0).end());
    std::sort(x.begin(), x.end());
    std::size_t w = 1, run = 1;
    for (std::size_t i = 1; i < x.size(); ++i) {
      run = x[i] == x[i - 1] ? run + 1 : 1;
      w = std::max(w, run);
    }
    const auto [lo, hi] = std::minmax_element(d.targets().begin(), d.targets().end());
    const double n = static_cast<double>(d.n_samples());
    const double step = task == Task::regression ? (*hi - *lo) * (*hi - *lo) : std::log(n + 1) + 1;
    const auto r = minimax_search(node, 0);
    ASSERT_LE(std::max(r.left_risk, r.right_risk), parent / 2 + static_cast<double>(w) * step + 1e-9);
  }
}

TEST(Splitting, ScaleEquivariance) {
  Stream s(28);
  for (int rep = 0; rep < 300; ++rep) {
    const Dataset d = random_node(s);
    std::vector<double> x(d.feature(0).begin(), d.feature(0).end());
    std::vector<double> y(d.targets().begin(), d.targets().end());
    for (double& v : x) v *= 2.0;
    for (double& v : y) v *= -4.0;
    const Dataset e = one_d(x, y);
    for (auto mode : {ScanMode::sum, ScanMode::max}) {
      const auto a = scan_feature(NodeView::root(d), 0, mode);
      const auto b = scan_feature(NodeView::root(e), 0, mode);
      ASSERT_EQ(2.0 * a.threshold, b.threshold);
      ASSERT_NEAR(16.0 * a.criterion_value, b.criterion_value, 1e-9 * (1 + b.criterion_value));
    }
  }
}
