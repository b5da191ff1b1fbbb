#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmtree/error.hpp"
#include "mmtree/experiments.hpp"

using namespace mmtree;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mmtree_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

void write_series(const fs::path& p, std::size_t n, double (*f)(double)) {
  std::ofstream out(p);
  out << "t,v\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    out << t << "," << f(t) << "\n";
  }
}

}  // namespace

TEST(Experiments, EcpProportionsInRange) {
  EcpConfig cfg;
  cfg.n = 200;
  cfg.replicates = 40;
  const auto r = run_ecp(cfg, {});
  EXPECT_EQ(r.rows.size(), 3u * 4u * 40u);
  for (const auto& row : r.rows) {
    ASSERT_GT(row.proportion, 0.0);
    ASSERT_LE(row.proportion, 0.5);
  }
  EXPECT_EQ(r.summary.size(), 12u);
  const auto& mm = r.find("normal", "minimax");
  EXPECT_GE(mm.median, 0.3);
  EXPECT_THROW(r.find("normal", "gini"), std::out_of_range);
}

TEST(Experiments, LeafSizeAccounting) {
  LeafSizeConfig cfg;
  cfg.n = 500;
  cfg.replicates = 2;
  cfg.max_depth = 5;
  const auto r = run_leaf_size(cfg, {});
  for (const auto& row : r.rows) {
    if (row.depth == 0) {
      ASSERT_EQ(row.mean, 500.0);
      ASSERT_EQ(row.sd, 0.0);
    }
    ASSERT_NEAR(row.mean * static_cast<double>(row.leaf_count), 500.0, 1e-9);
    if (row.method == "minimax" && row.depth > 0) {
      const double balanced = 500.0 / std::ldexp(1.0, static_cast<int>(row.depth));
      ASSERT_LE(row.mean, 2 * balanced + 5) << row.depth;
      ASSERT_GE(row.mean, balanced / 2);
    }
  }
}

TEST(Experiments, SineTraces) {
  SineConfig cfg;
  cfg.ps = {1, 3};
  cfg.n = 2000;
  cfg.replicates = 2;
  cfg.max_depth = 8;
  cfg.sigma = 0.1;
  cfg.test_n = 500;
  const auto r = run_sine(cfg, {});
  for (int p : cfg.ps)
    for (const auto& m : cfg.methods)
      for (std::size_t rep = 0; rep < 2; ++rep) {
        const auto t = r.trace(p, m, rep);
        ASSERT_EQ(t.size(), 9u);
        for (std::size_t k = 1; k < t.size(); ++k) ASSERT_LE(t[k], t[k - 1]);
      }
  const auto t1 = r.trace(1, "minimax", 0);
  EXPECT_GT(t1[1] / t1[0], 0.9);
  EXPECT_EQ(r.fits.size(), 2u * 2u * 2u * 2u);
}

TEST(Experiments, AsbpSchedules) {
  AsbpConfig cfg;
  cfg.n = 1000;
  cfg.replicates = 2;
  cfg.max_depth = 4;
  cfg.test_n = 1000;
  const auto r = run_asbp(cfg, {});
  EXPECT_FALSE(r.warnings.empty());
  for (const auto& row : r.rows) {
    ASSERT_TRUE(std::isfinite(row.test_mse));
    if (row.method == "cyclic_minimax")
      for (auto f : row.split_features) ASSERT_EQ(f, (row.depth - 1) % 2);
  }
}

TEST(Experiments, PowellShape) {
  PowellConfig cfg;
  cfg.ns = {300};
  cfg.ds = {4, 8};
  cfg.test_n = 500;
  const auto r = run_powell(cfg, {});
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.mse));
    EXPECT_GE(row.mse, 0.0);
  }
  cfg.ds = {6};
  EXPECT_THROW(run_powell(cfg, {}), ConfigError);
}

TEST(Experiments, TimeseriesLinear) {
  const auto dir = scratch("ts_linear");
  write_series(dir / "lin.csv", 1000, [](double t) { return 3.0 * t - 1.0; });
  TimeseriesConfig cfg;
  cfg.input = (dir / "lin.csv").string();
  cfg.time_column = "t";
  cfg.value_column = "v";
  cfg.depths = {10};
  const auto r = run_timeseries(cfg, {});
  for (const auto& m : cfg.methods) {
    ASSERT_TRUE(r.find(m, 10).r2);
    EXPECT_GT(*r.find(m, 10).r2, 0.99) << m;
  }
  EXPECT_EQ(r.test_indices.size(), 200u);
  EXPECT_EQ(run_timeseries(cfg, {}).test_indices, r.test_indices);
  RunOptions other;
  other.seed = 99;
  EXPECT_NE(run_timeseries(cfg, other).test_indices, r.test_indices);
}

TEST(Experiments, TimeseriesToleratesUnsortedTime) {
  const auto dir = scratch("ts_unsorted");
  {
    std::ofstream out(dir / "u.csv");
    out << "time,value\n";
    for (int i = 99; i >= 0; --i) out << i << "," << std::sin(i / 10.0) << "\n";
  }
  TimeseriesConfig cfg;
  cfg.input = (dir / "u.csv").string();
  cfg.depths = {3};
  const auto r = run_timeseries(cfg, {});
  EXPECT_FALSE(r.warnings.empty());
  {
    std::ofstream out(dir / "empty.csv");
    out << "time,value\n";
  }
  cfg.input = (dir / "empty.csv").string();
  EXPECT_THROW(run_timeseries(cfg, {}), DataError);
}

TEST(Experiments, MartingaleUniformCurvesCoincide) {
  MartingaleConfig cfg;
  cfg.max_depth = 8;
  const auto r = run_martingale(cfg, {});
  ASSERT_EQ(r.mse.size(), 4u);
  for (std::size_t k = 0; k <= 8; ++k)
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(r.mse[i][k], r.mse[0][k], 1e-3 * r.mse[0][k]);
  cfg.density = "power10";
  cfg.max_depth = 10;
  const auto p = run_martingale(cfg, {});
  for (const auto& curve : p.ratio) EXPECT_EQ(curve.size(), 10u);
  cfg.density = "nope";
  EXPECT_THROW(run_martingale(cfg, {}), ConfigError);
}

TEST(Experiments, DenoiseBeatsNoise) {
  DenoiseConfig cfg;
  cfg.phantom_size = 32;
  cfg.n_trees = 6;
  cfg.max_depth = 8;
  cfg.methods = {"minimax"};
  cfg.write_images = false;
  const auto r = run_denoise(cfg, {});
  const double noisy = r.find("noisy", "none", 0).mse;
  EXPECT_NEAR(noisy, 0.01, 0.003);
  for (const auto& row : r.rows)
    if (row.model == "forest") EXPECT_LT(row.mse, noisy);
}

TEST(Experiments, RunExperimentWritesTablesAndManifest) {
  const auto dir = scratch("run_powell");
  const std::string cfg = R"({"ns":[200],"ds":[4],"test_n":200})";
  const auto files = run_experiment("powell", cfg, {}, dir);
  ASSERT_FALSE(files.empty());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_EQ(first_line(dir / "powell.csv"), "n,d,method,mse");
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["experiment"], "powell");
  EXPECT_EQ(manifest["seed"], 1);
  const std::string before = slurp(dir / "powell.csv");
  run_experiment("powell", cfg, {}, dir);
  EXPECT_EQ(slurp(dir / "powell.csv"), before);
}

TEST(Experiments, ConfigErrors) {
  const auto dir = scratch("errors");
  EXPECT_THROW(run_experiment("powell", R"({"bogus":1})", {}, dir), ConfigError);
  EXPECT_THROW(run_experiment("powell", "[1,2]", {}, dir), ConfigError);
  EXPECT_THROW(run_experiment("powell", "{not json", {}, dir), ConfigError);
  EXPECT_THROW(run_experiment("nope", "{}", {}, dir), ConfigError);
  EXPECT_THROW(run_experiment("ecp", R"({"replicates":0})", {}, dir), ConfigError);
  EXPECT_EQ(experiment_names().size(), 8u);
}

TEST(Experiments, EverySchema) {
  const struct {
    const char* name;
    const char* config;
    const char* file;
    const char* header;
  } cases[] = {
      {"ecp", R"({"n":50,"replicates":3})", "ecp.csv", "noise,method,replicate,proportion"},
      {"leafsize", R"({"n":100,"replicates":1,"max_depth":2})", "leafsize.csv", nullptr},
      {"sine", R"({"n":200,"replicates":1,"max_depth":5,"ps":[1]})", "sine_trace.csv", nullptr},
      {"asbp", R"({"n":200,"replicates":1,"test_n":100})", "asbp.csv", nullptr},
      {"martingale", R"({"grid":256,"max_depth":3})", "martingale_mse.csv", nullptr},
  };
  for (const auto& c : cases) {
    const auto dir = scratch(std::string("schema_") + c.name);
    run_experiment(c.name, c.config, {}, dir);
    ASSERT_TRUE(fs::exists(dir / c.file)) << c.name;
    const std::string header = first_line(dir / c.file);
    EXPECT_FALSE(header.empty());
    if (c.header) EXPECT_EQ(header, c.header);
    const std::string once = slurp(dir / c.file);
    run_experiment(c.name, c.config, {}, dir);
    EXPECT_EQ(slurp(dir / c.file), once) << c.name;
  }
}

TEST(Experiments, EcpBalanceAndUniformBaseline) {
  EcpConfig cfg;
  cfg.noises = {"normal"};
  cfg.replicates = 1000;
  RunOptions opt;
  opt.threads = 4;
  const auto r = run_ecp(cfg, opt);
  const double med = r.find("normal", "minimax").median;
  EXPECT_GE(med, 0.35);
  EXPECT_LE(med, 0.5);
  // min(U, 1 - U) is uniform on (0, 1/2]: CDF 2p.
  std::vector<double> p;
  for (const auto& row : r.rows)
    if (row.method == "random_uniform") p.push_back(row.proportion);
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  const double n = static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double cdf = std::min(1.0, 2.0 * p[i]);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 0.1);
}

TEST(Experiments, SineMinimaxEndsLower) {
  SineConfig cfg;
  cfg.ps = {2, 3, 4};
  RunOptions opt;
  opt.threads = 4;
  const auto r = run_sine(cfg, opt);
  for (int p : cfg.ps) {
    int wins = 0;
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep)
      wins += r.trace(p, "minimax", rep).back() < r.trace(p, "variance", rep).back();
    EXPECT_GT(wins, 5) << "p=" << p;
  }
}

TEST(Experiments, TimeseriesSineMinimaxNotWorse) {
  const auto dir = scratch("ts_sine");
  write_series(dir / "s.csv", 2000, [](double t) { return std::sin(12.0 * t) + 0.5 * std::sin(31.0 * t); });
  TimeseriesConfig cfg;
  cfg.input = (dir / "s.csv").string();
  cfg.time_column = "t";
  cfg.value_column = "v";
  cfg.depths = {10};
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunOptions opt;
    opt.seed = seed;
    const auto r = run_timeseries(cfg, opt);
    wins += r.find("minimax", 10).rmse <= r.find("variance", 10).rmse;
  }
  EXPECT_GT(wins, 5);
}

TEST(Experiments, ForestBeatsSingleTreeSsim) {
  DenoiseConfig cfg;
  cfg.methods = {"minimax"};
  cfg.m_try = {0};
  cfg.write_images = false;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunOptions opt;
    opt.seed = seed;
    opt.threads = 4;
    const auto r = run_denoise(cfg, opt);
    wins += r.find("forest", "minimax", 2).ssim >= r.find("tree", "minimax", 2).ssim;
  }
  EXPECT_GE(wins, 3);
}

TEST(Experiments, PowellDenseRegimeAgrees) {
  PowellConfig cfg;
  cfg.ns = {10000};
  cfg.ds = {4};
  const auto r = run_powell(cfg, {});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_LE(std::abs(r.rows[0].mse - r.rows[1].mse), 0.1 * std::min(r.rows[0].mse, r.rows[1].mse));
}
