#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmtree {

std::string_view library_version();

/// Settings shared by every experiment; `seed` and `threads` may be
/// overridden from the command line.
struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

// ---------------------------------------------------------------- ecp

struct EcpConfig {
  std::size_t n = 500;
  std::size_t replicates = 1000;
  /// "normal", or "t<dof>" such as "t3", "t1".
  std::vector<std::string> noises{"normal", "t3", "t1"};
  std::vector<std::string> methods{"variance", "minimax", "random_uniform", "random_observed"};
  double threshold = 0.05;
};

struct EcpRow {
  std::string noise, method;
  std::size_t replicate = 0;
  double proportion = 0.0;
};

struct EcpSummary {
  std::string noise, method;
  double median = 0.0;
  double frac_below = 0.0;
};

struct EcpResult {
  std::vector<EcpRow> rows;
  std::vector<EcpSummary> summary;
  const EcpSummary& find(const std::string& noise, const std::string& method) const;
};

EcpResult run_ecp(const EcpConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- leafsize

struct LeafSizeConfig {
  std::size_t n = 2000;
  std::vector<double> sigmas{0.01, 0.1};
  std::vector<std::string> methods{"variance", "minimax", "one_sided_min", "one_sided_max"};
  std::size_t max_depth = 8;
  std::size_t min_leaf = 5;
  std::size_t replicates = 20;
};

struct LeafSizeRow {
  double sigma = 0.0;
  std::string method;
  std::size_t depth = 0;
  std::size_t replicate = 0;
  std::size_t leaf_count = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct LeafSizeSummary {
  double sigma = 0.0;
  std::string method;
  std::size_t depth = 0;
  double mean = 0.0;  // averaged over replicates
  double sd = 0.0;
};

struct LeafSizeResult {
  std::vector<LeafSizeRow> rows;
  std::vector<LeafSizeSummary> summary;
};

LeafSizeResult run_leaf_size(const LeafSizeConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- sine

struct SineConfig {
  std::vector<int> ps{1, 2, 3, 4};
  std::vector<std::string> methods{"variance", "minimax"};
  std::size_t n = 10000;
  std::size_t max_depth = 12;
  std::size_t replicates = 10;
  /// Noise level; when positive a held-out fit table is also produced.
  double sigma = 0.0;
  std::vector<std::size_t> fit_depths{4, 5};
  std::size_t test_n = 10000;
};

struct SineTraceRow {
  int p = 0;
  std::string method;
  std::size_t replicate = 0;
  std::size_t depth = 0;
  double risk = 0.0;
};

struct SineFitRow {
  int p = 0;
  std::string method;
  std::size_t depth = 0;
  std::size_t replicate = 0;
  double test_mse = 0.0;
};

struct SineResult {
  std::vector<SineTraceRow> traces;
  std::vector<SineFitRow> fits;
  /// risk at depth k for one (p, method, replicate).
  std::vector<double> trace(int p, const std::string& method, std::size_t replicate) const;
};

SineResult run_sine(const SineConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- asbp

struct AsbpConfig {
  std::size_t n = 4096;
  std::size_t d = 2;
  std::size_t max_depth = 3;
  std::vector<std::string> methods{"minimax", "cyclic_minimax"};
  std::size_t replicates = 10;
  std::size_t test_n = 10000;
  /// When positive, also trains minimax forests with m_try = 1 and m_try = d.
  std::size_t forest_trees = 0;
  bool bootstrap = true;
};

struct AsbpRow {
  std::string method;
  std::size_t replicate = 0;
  std::size_t depth = 0;
  /// Features split on at this level (empty for depth 0 and for forests).
  std::vector<std::size_t> split_features;
  double test_mse = 0.0;
};

struct AsbpResult {
  std::vector<AsbpRow> rows;
  std::vector<std::string> warnings;
};

AsbpResult run_asbp(const AsbpConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- denoise

struct DenoiseConfig {
  /// PGM to denoise; empty selects the builtin phantom of size phantom_size.
  std::string input;
  std::size_t phantom_size = 64;
  double sigma = 0.1;
  std::vector<std::string> methods{"variance", "minimax", "cyclic_minimax"};
  /// Values of m_try; 0 stands for d.
  std::vector<std::size_t> m_try{0, 1};
  std::size_t n_trees = 50;
  std::size_t max_depth = 10;
  bool single_trees = true;
  bool bootstrap = true;
  bool write_images = true;
};

struct DenoiseRow {
  std::string model;  // "noisy", "forest" or "tree"
  std::string method;
  std::size_t m_try = 0;
  double mse = 0.0, rmse = 0.0, mae = 0.0;
  std::optional<double> r2;
  double ssim = 0.0;
};

struct DenoiseResult {
  std::size_t height = 0, width = 0;
  std::vector<DenoiseRow> rows;
  /// Reconstructions in row order (empty for the noisy row).
  std::vector<std::vector<double>> images;
  std::vector<double> clean, noisy;
  const DenoiseRow& find(const std::string& model, const std::string& method, std::size_t m_try) const;
};

DenoiseResult run_denoise(const DenoiseConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- powell

struct PowellConfig {
  std::vector<std::size_t> ns{1000, 10000};
  std::vector<std::size_t> ds{4, 8};
  std::vector<std::string> methods{"variance", "minimax"};
  std::size_t max_depth = 3;
  std::size_t test_n = 10000;
  double sigma = 0.0;
};

struct PowellRow {
  std::size_t n = 0, d = 0;
  std::string method;
  double mse = 0.0;
};

struct PowellResult {
  std::vector<PowellRow> rows;
};

PowellResult run_powell(const PowellConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- timeseries

struct TimeseriesConfig {
  std::string input;
  std::string time_column = "0";
  std::string value_column = "1";
  double holdout = 0.2;
  std::size_t downsample = 1;
  std::vector<std::size_t> depths{2, 4, 6, 8, 10};
  std::vector<std::string> methods{"variance", "minimax"};
  std::size_t min_leaf = 1;
};

struct TimeseriesMetricRow {
  std::string method;
  std::size_t depth = 0;
  double rmse = 0.0, mae = 0.0;
  std::optional<double> r2;
};

struct TimeseriesPrediction {
  std::string method;
  std::size_t depth = 0;
  double time = 0.0, truth = 0.0, prediction = 0.0;
};

struct TimeseriesResult {
  std::vector<TimeseriesMetricRow> metrics;
  std::vector<TimeseriesPrediction> predictions;
  /// Positions (in time order, after downsampling) of the held-out samples.
  std::vector<std::size_t> test_indices;
  std::vector<std::string> warnings;
  const TimeseriesMetricRow& find(const std::string& method, std::size_t depth) const;
};

TimeseriesResult run_timeseries(const TimeseriesConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- martingale

struct MartingaleConfig {
  /// Builtin density (uniform, ramp, power10, exponential); ignored when atoms is set.
  std::string density = "uniform";
  /// Optional CSV with columns atom, weight.
  std::string atoms;
  std::size_t grid = 1u << 16;
  std::size_t max_depth = 12;
  std::vector<std::string> rules{"variance", "simons", "minimax", "median"};
};

struct MartingaleResult {
  std::vector<std::string> rules;
  /// mse[r][k] for rule r at depth k.
  std::vector<std::vector<double>> mse;
  std::vector<std::vector<double>> ratio;
};

MartingaleResult run_martingale(const MartingaleConfig& cfg, const RunOptions& opt);

// ---------------------------------------------------------------- generic

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Parses `config_json` (an object; unknown keys are errors) for the named
/// experiment, runs it and writes CSV tables plus manifest.json into `out_dir`.
/// Returns the written file names.
std::vector<std::string> run_experiment(const std::string& name, const std::string& config_json,
                                        const RunOptions& opt, const std::filesystem::path& out_dir);

}  // namespace mmtree
