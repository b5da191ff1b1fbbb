#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/io.hpp"
#include "mmtree/metrics.hpp"
#include "mmtree/tree.hpp"

namespace mmtree {

namespace {

ColumnRef column_ref(const std::string& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return static_cast<std::size_t>(std::stoull(s));
  }
  return s;
}

}  // namespace

const TimeseriesMetricRow& TimeseriesResult::find(const std::string& method, std::size_t depth) const {
  for (const auto& m : metrics) {
    if (m.method == method && m.depth == depth) return m;
  }
  throw std::out_of_range("no timeseries row for " + method);
}

TimeseriesResult run_timeseries(const TimeseriesConfig& cfg, const RunOptions& opt) {
  if (cfg.input.empty()) throw ConfigError("timeseries needs an input CSV");
  if (!(cfg.holdout > 0.0 && cfg.holdout < 1.0)) throw ConfigError("holdout must be in (0, 1)");
  if (cfg.downsample < 1) throw ConfigError("downsample factor must be at least 1");
  std::vector<SplitCriterion> crits;
  for (const auto& m : cfg.methods) {
    crits.push_back(parse_criterion(m));
    check_compatible(crits.back(), Task::regression);
  }
  TimeseriesResult out;
  const CsvTable table = read_csv_table(cfg.input);
  if (table.rows.empty()) throw DataError("'" + cfg.input + "' has no data rows");
  const std::size_t tc = table.column(column_ref(cfg.time_column));
  const std::size_t vc = table.column(column_ref(cfg.value_column));

  std::vector<std::pair<double, double>> series;
  bool numeric_time = true;
  for (std::size_t i = 0; i < table.rows.size() && numeric_time; ++i) {
    try {
      parse_number(table.rows[i][tc], "");
    } catch (const DataError&) {
      numeric_time = false;
    }
  }
  if (!numeric_time) out.warnings.push_back("time column is not numeric; using row order as time");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string where = "row " + std::to_string(i + 1);
    const double t = numeric_time ? parse_number(table.rows[i][tc], where + ", time") : static_cast<double>(i);
    series.emplace_back(t, parse_number(table.rows[i][vc], where + ", value"));
  }
  if (!std::is_sorted(series.begin(), series.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; })) {
    out.warnings.push_back("time column is not sorted; rows were sorted by time");
    std::stable_sort(series.begin(), series.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  if (cfg.downsample > 1) {
    std::vector<std::pair<double, double>> kept;
    for (std::size_t i = 0; i < series.size(); i += cfg.downsample) kept.push_back(series[i]);
    series = std::move(kept);
  }
  const std::size_t n = series.size();
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.holdout * static_cast<double>(n)));
  if (n_test < 1 || n_test >= n) throw DataError("series too short for the requested holdout");

  // Seeded holdout, shared by every method and depth.
  Stream rng = Stream(opt.seed).derive("holdout");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < n_test; ++i) std::swap(perm[i], perm[i + rng.index(n - i)]);
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::sort(test.begin(), test.end());
  out.test_indices = test;
  std::vector<bool> is_test(n, false);
  for (std::size_t i : test) is_test[i] = true;

  std::vector<double> tr_t, tr_y, te_t, te_y;
  for (std::size_t i = 0; i < n; ++i) {
    (is_test[i] ? te_t : tr_t).push_back(series[i].first);
    (is_test[i] ? te_y : tr_y).push_back(series[i].second);
  }
  long double mean = 0.0L;
  for (double v : tr_y) mean += v;
  mean /= static_cast<long double>(tr_y.size());
  long double var = 0.0L;
  for (double v : tr_y) var += (v - mean) * (v - mean);
  var /= static_cast<long double>(tr_y.size());
  const double mu = static_cast<double>(mean);
  const double sd = var > 0.0L ? static_cast<double>(std::sqrt(var)) : 1.0;
  if (!(var > 0.0L)) out.warnings.push_back("training values are constant; not scaled");
  for (double& v : tr_y) v = (v - mu) / sd;
  for (double& v : te_y) v = (v - mu) / sd;

  const Dataset train({tr_t}, tr_y, Task::regression, {"time"});
  for (std::size_t m = 0; m < crits.size(); ++m) {
    const std::size_t K = cfg.depths.empty() ? 0 : *std::max_element(cfg.depths.begin(), cfg.depths.end());
    GrowConfig g;
    g.max_depth = K;
    g.min_leaf = cfg.min_leaf;
    g.criterion = crits[m];
    g.seed = Stream(opt.seed).derive("tree").key();
    const TreeModel tree = grow(train, g);
    for (std::size_t k : cfg.depths) {
      std::vector<double> pred(te_t.size());
      for (std::size_t i = 0; i < te_t.size(); ++i) {
        const double x = te_t[i];
        pred[i] = tree.predict_at_depth(std::span(&x, 1), k);
        out.predictions.push_back({cfg.methods[m], k, te_t[i], te_y[i], pred[i]});
      }
      const MetricReport rep = regression_metrics(te_y, pred);
      out.metrics.push_back({cfg.methods[m], k, rep.rmse, rep.mae, rep.r2});
    }
  }
  return out;
}

namespace detail {

std::vector<std::string> write_timeseries(const TimeseriesResult& r, const std::filesystem::path& dir) {
  CsvWriter m({"method", "depth", "rmse", "mae", "r2"});
  for (const auto& x : r.metrics) m.row(x.method, x.depth, x.rmse, x.mae, x.r2 ? fmt(*x.r2) : std::string("NA"));
  CsvWriter p({"method", "depth", "time", "truth", "prediction"});
  for (const auto& x : r.predictions) p.row(x.method, x.depth, x.time, x.truth, x.prediction);
  write_file(dir / "timeseries_metrics.csv", m.str());
  write_file(dir / "timeseries_predictions.csv", p.str());
  return {"timeseries_metrics.csv", "timeseries_predictions.csv"};
}

}  // namespace detail

}  // namespace mmtree
