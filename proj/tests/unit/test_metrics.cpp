#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mmtree/error.hpp"
#include "mmtree/metrics.hpp"
#include "mmtree/rng.hpp"
#include "oracles.hpp"

using namespace mmtree;

TEST(Metrics, TwoPointExample) {
  const std::vector<double> y{0, 2}, yhat{1, 1};
  const auto r = regression_metrics(y, yhat);
  EXPECT_EQ(r.mse, 1.0);
  EXPECT_EQ(r.rmse, 1.0);
  EXPECT_EQ(r.mae, 1.0);
  ASSERT_TRUE(r.r2);
  EXPECT_EQ(*r.r2, 0.0);
  EXPECT_FALSE(r.ssim);
}

TEST(Metrics, PerfectAndMeanPredictions) {
  const std::vector<double> y{1, 4, 2, 8, 5};
  const auto p = regression_metrics(y, y);
  EXPECT_EQ(p.mse, 0.0);
  EXPECT_EQ(p.mae, 0.0);
  EXPECT_EQ(*p.r2, 1.0);
  const std::vector<double> m(5, 4.0);
  EXPECT_NEAR(*regression_metrics(y, m).r2, 0.0, 1e-15);
}

TEST(Metrics, RsquaredIdentity) {
  Stream s(1);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> y(50), yhat(50);
    for (std::size_t i = 0; i < 50; ++i) {
      y[i] = s.normal();
      yhat[i] = y[i] + 0.5 * s.normal();
    }
    const auto r = regression_metrics(y, yhat);
    double mean = 0;
    for (double v : y) mean += v;
    mean /= 50;
    double var = 0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= 50;
    ASSERT_NEAR(*r.r2, 1.0 - r.mse / var, 1e-12);
    ASSERT_LE(*r.r2, 1.0);
    ASSERT_EQ(r.rmse, std::sqrt(r.mse));
  }
}

TEST(Metrics, ConstantTargetLeavesRsquaredUndefined) {
  const std::vector<double> y{3, 3, 3}, yhat{1, 2, 3};
  const auto r = regression_metrics(y, yhat);
  EXPECT_FALSE(r.r2);
  EXPECT_TRUE(nlohmann::json::parse(to_json(r))["r2"].is_null());
}

TEST(Metrics, LengthErrors) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(regression_metrics(a, b), DataError);
  EXPECT_THROW(regression_metrics({}, {}), DataError);
}

TEST(Metrics, GaussianWindowNormalized) {
  const auto g = gaussian_window(11, 1.5);
  ASSERT_EQ(g.size(), 121u);
  double s = 0;
  for (double v : g) s += v;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_EQ(g[5 * 11 + 5], *std::max_element(g.begin(), g.end()));
}

TEST(Metrics, SsimMatchesNaiveLoop) {
  Stream s(2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(32 * 32), b(32 * 32);
    for (auto& v : a) v = s.uniform();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::clamp(a[i] + 0.3 * s.normal(), 0.0, 1.0);
    const ImageGrid ia(32, 32, a), ib(32, 32, b);
    const double fast = ssim(ia, ib);
    ASSERT_NEAR(fast, oracle::ssim(a, b, 32, 32), 1e-10);
    ASSERT_NEAR(fast, ssim(ib, ia), 1e-14);
    ASSERT_LE(std::abs(fast), 1.0);
  }
}

TEST(Metrics, SsimIdentityIsExactlyOne) {
  Stream s(3);
  std::vector<double> a(20 * 24);
  for (auto& v : a) v = s.uniform();
  const ImageGrid img(20, 24, a);
  EXPECT_EQ(ssim(img, img), 1.0);
}

TEST(Metrics, CheckerboardInversionIsNegative) {
  std::vector<double> a(16 * 16), b(16 * 16);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) {
      a[r * 16 + c] = (r + c) % 2 ? 0.9 : 0.1;
      b[r * 16 + c] = 1.0 - a[r * 16 + c];
    }
  const double v = ssim(ImageGrid(16, 16, a), ImageGrid(16, 16, b));
  EXPECT_LT(v, 0.0);
  EXPECT_NEAR(v, oracle::ssim(a, b, 16, 16), 1e-10);
}

TEST(Metrics, ConstantImages) {
  const double a = 0.3, b = 0.7, c1 = 1e-4;
  const ImageGrid ia(12, 12, std::vector<double>(144, a)), ib(12, 12, std::vector<double>(144, b));
  EXPECT_NEAR(ssim(ia, ib), (2 * a * b + c1) / (a * a + b * b + c1), 1e-12);
}

TEST(Metrics, SsimShapeErrors) {
  const ImageGrid a(12, 12, std::vector<double>(144, 0.5));
  const ImageGrid b(12, 13, std::vector<double>(156, 0.5));
  const ImageGrid tiny(5, 5, std::vector<double>(25, 0.5));
  EXPECT_THROW(ssim(a, b), DataError);
  EXPECT_THROW(ssim(tiny, tiny), DataError);
}

TEST(Metrics, ImageMetricsAndJsonKeys) {
  const ImageGrid a(12, 12, std::vector<double>(144, 0.5));
  std::vector<double> px(144, 0.5);
  px[0] = 0.6;
  const ImageGrid b(12, 12, px);
  const auto r = image_metrics(a, b);
  ASSERT_TRUE(r.ssim);
  EXPECT_NEAR(r.mse, 0.01 / 144, 1e-15);
  const auto j = nlohmann::json::parse(to_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys.size(), 5u);
  EXPECT_TRUE(j.contains("mse") && j.contains("rmse") && j.contains("mae") && j.contains("r2") &&
              j.contains("ssim"));
}
