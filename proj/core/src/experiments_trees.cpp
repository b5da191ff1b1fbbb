#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/forest.hpp"
#include "mmtree/io.hpp"
#include "mmtree/synthetic.hpp"
#include "mmtree/tree.hpp"

namespace mmtree {

namespace {

std::vector<SplitCriterion> regression_criteria(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("method list is empty");
  std::vector<SplitCriterion> out;
  for (const auto& m : names) {
    out.push_back(parse_criterion(m));
    check_compatible(out.back(), Task::regression);
  }
  return out;
}

double mse_at_depth(const TreeModel& t, const SyntheticData& test, std::size_t k) {
  long double se = 0.0L;
  const std::size_t n = test.data.n_samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = t.predict_at_depth(test.data.row(i), k) - test.truth[i];
    se += e * e;
  }
  return static_cast<double>(se / static_cast<long double>(n));
}

}  // namespace

std::vector<double> SineResult::trace(int p, const std::string& method, std::size_t replicate) const {
  std::vector<double> out;
  for (const auto& r : traces) {
    if (r.p == p && r.method == method && r.replicate == replicate) out.push_back(r.risk);
  }
  return out;
}

SineResult run_sine(const SineConfig& cfg, const RunOptions& opt) {
  const auto crits = regression_criteria(cfg.methods);
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  for (std::size_t k : cfg.fit_depths) {
    if (k > cfg.max_depth) throw ConfigError("fit depth exceeds max_depth");
  }
  const Stream root = Stream(opt.seed).derive("sine");
  const std::size_t R = cfg.replicates;
  const std::size_t M = crits.size();
  const bool fit = cfg.sigma > 0.0;
  struct Job {
    std::vector<std::vector<double>> traces;            // per method
    std::vector<std::vector<double>> fits;              // per method, per fit depth
  };
  std::vector<Job> jobs(cfg.ps.size() * R);
  detail::parallel_for(jobs.size(), opt.threads, [&](std::size_t job) {
    const int p = cfg.ps[job / R];
    const std::size_t r = job % R;
    GeneratorSpec spec;
    spec.generator = "sine";
    spec.p = p;
    spec.n = cfg.n;
    spec.sigma = cfg.sigma;
    const Stream s = root.derive("p" + std::to_string(p), r);
    const auto train = gen_synthetic(spec, s.derive("train").key());
    std::optional<SyntheticData> test;
    if (fit) {
      spec.n = cfg.test_n;
      test = gen_synthetic(spec, s.derive("test").key());
    }
    for (std::size_t m = 0; m < M; ++m) {
      GrowConfig g;
      g.max_depth = cfg.max_depth;
      g.criterion = crits[m];
      g.seed = s.derive("tree").key();
      const TreeModel t = grow(train.data, g);
      jobs[job].traces.push_back(t.risk_trace);
      std::vector<double> f;
      if (fit) {
        for (std::size_t k : cfg.fit_depths) f.push_back(mse_at_depth(t, *test, k));
      }
      jobs[job].fits.push_back(std::move(f));
    }
  });
  SineResult out;
  for (std::size_t pi = 0; pi < cfg.ps.size(); ++pi) {
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t r = 0; r < R; ++r) {
        const Job& j = jobs[pi * R + r];
        for (std::size_t k = 0; k < j.traces[m].size(); ++k) {
          out.traces.push_back({cfg.ps[pi], cfg.methods[m], r, k, j.traces[m][k]});
        }
        for (std::size_t f = 0; f < j.fits[m].size(); ++f) {
          out.fits.push_back({cfg.ps[pi], cfg.methods[m], cfg.fit_depths[f], r, j.fits[m][f]});
        }
      }
    }
  }
  return out;
}

AsbpResult run_asbp(const AsbpConfig& cfg, const RunOptions& opt) {
  const auto crits = regression_criteria(cfg.methods);
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  AsbpResult out;
  const double needed = std::pow(64.0, static_cast<double>(cfg.max_depth));
  if (static_cast<double>(cfg.n) < needed) {
    out.warnings.push_back("n = " + std::to_string(cfg.n) + " is below 64^K = " + detail::fmt(needed) +
                           "; the first-coordinate split pattern is only guaranteed for larger n");
  }
  const Stream root = Stream(opt.seed).derive("asbp");
  std::vector<std::vector<AsbpRow>> per(cfg.replicates);
  detail::parallel_for(cfg.replicates, opt.threads, [&](std::size_t r) {
    const Stream s = root.derive("replicate", r);
    GeneratorSpec spec;
    spec.generator = "asbp";
    spec.d = cfg.d;
    spec.n = cfg.n;
    const auto train = gen_synthetic(spec, s.derive("train").key());
    spec.n = cfg.test_n;
    const auto test = gen_synthetic(spec, s.derive("test").key());
    for (std::size_t m = 0; m < crits.size(); ++m) {
      GrowConfig g;
      g.max_depth = cfg.max_depth;
      g.criterion = crits[m];
      g.seed = s.derive("tree").key();
      const TreeModel t = grow(train.data, g);
      for (std::size_t k = 0; k <= cfg.max_depth; ++k) {
        AsbpRow row{cfg.methods[m], r, k, {}, mse_at_depth(t, test, k)};
        if (k > 0) row.split_features = t.split_features[k - 1];
        per[r].push_back(std::move(row));
      }
    }
    if (cfg.forest_trees > 0) {
      for (std::size_t mtry : {std::size_t{1}, cfg.d}) {
        ForestConfig fc;
        fc.n_trees = cfg.forest_trees;
        fc.tree.max_depth = cfg.max_depth;
        fc.tree.criterion = SplitCriterion::minimax;
        fc.m_try = mtry;
        fc.bootstrap = cfg.bootstrap;
        fc.seed = s.derive("forest", mtry).key();
        const ForestModel f = train_forest(train.data, fc);
        const auto pred = predict_forest(f, test.data);
        long double se = 0.0L;
        for (std::size_t i = 0; i < pred.size(); ++i) se += (pred[i] - test.truth[i]) * (pred[i] - test.truth[i]);
        per[r].push_back({"forest_minimax_mtry" + std::to_string(mtry), r, cfg.max_depth, {},
                          static_cast<double>(se / static_cast<long double>(pred.size()))});
      }
    }
  });
  for (auto& v : per) {
    for (auto& row : v) out.rows.push_back(std::move(row));
  }
  return out;
}

PowellResult run_powell(const PowellConfig& cfg, const RunOptions& opt) {
  const auto crits = regression_criteria(cfg.methods);
  for (std::size_t d : cfg.ds) {
    if (d == 0 || d % 4 != 0) throw ConfigError("powell dimension must be a positive multiple of 4");
  }
  const Stream root = Stream(opt.seed).derive("powell");
  const std::size_t cells = cfg.ns.size() * cfg.ds.size();
  std::vector<std::vector<PowellRow>> per(cells);
  detail::parallel_for(cells, opt.threads, [&](std::size_t c) {
    const std::size_t n = cfg.ns[c / cfg.ds.size()];
    const std::size_t d = cfg.ds[c % cfg.ds.size()];
    const Stream s = root.derive("n" + std::to_string(n) + "d" + std::to_string(d));
    GeneratorSpec spec;
    spec.generator = "powell";
    spec.n = n;
    spec.d = d;
    spec.sigma = cfg.sigma;
    const auto train = gen_synthetic(spec, s.derive("train").key());
    spec.n = cfg.test_n;
    spec.sigma = 0.0;
    const auto test = gen_synthetic(spec, s.derive("test").key());
    for (std::size_t m = 0; m < crits.size(); ++m) {
      GrowConfig g;
      g.max_depth = cfg.max_depth;
      g.criterion = crits[m];
      g.seed = s.derive("tree").key();
      const TreeModel t = grow(train.data, g);
      per[c].push_back({n, d, cfg.methods[m], mse_at_depth(t, test, cfg.max_depth)});
    }
  });
  PowellResult out;
  for (auto& v : per) {
    for (auto& row : v) out.rows.push_back(row);
  }
  return out;
}

namespace detail {

std::vector<std::string> write_sine(const SineResult& r, const std::filesystem::path& dir) {
  CsvWriter t({"p", "method", "replicate", "depth", "risk"});
  for (const auto& x : r.traces) t.row(x.p, x.method, x.replicate, x.depth, x.risk);
  write_file(dir / "sine_trace.csv", t.str());
  std::vector<std::string> files{"sine_trace.csv"};
  if (!r.fits.empty()) {
    CsvWriter f({"p", "method", "depth", "replicate", "test_mse"});
    for (const auto& x : r.fits) f.row(x.p, x.method, x.depth, x.replicate, x.test_mse);
    write_file(dir / "sine_fit.csv", f.str());
    // Average over replicates, keyed in first-appearance order.
    std::vector<std::tuple<int, std::string, std::size_t, double, std::size_t>> agg;
    for (const auto& x : r.fits) {
      auto it = std::find_if(agg.begin(), agg.end(), [&](const auto& a) {
        return std::get<0>(a) == x.p && std::get<1>(a) == x.method && std::get<2>(a) == x.depth;
      });
      if (it == agg.end()) {
        agg.emplace_back(x.p, x.method, x.depth, x.test_mse, 1);
      } else {
        std::get<3>(*it) += x.test_mse;
        ++std::get<4>(*it);
      }
    }
    CsvWriter s({"p", "method", "depth", "mean_test_mse"});
    for (const auto& [p, m, k, sum, cnt] : agg) s.row(p, m, k, sum / static_cast<double>(cnt));
    write_file(dir / "sine_fit_summary.csv", s.str());
    files.push_back("sine_fit.csv");
    files.push_back("sine_fit_summary.csv");
  }
  return files;
}

std::vector<std::string> write_asbp(const AsbpResult& r, const std::filesystem::path& dir) {
  CsvWriter w({"method", "replicate", "depth", "split_features", "test_mse"});
  for (const auto& x : r.rows) {
    std::string feats;
    for (std::size_t i = 0; i < x.split_features.size(); ++i) {
      feats += (i ? " " : "") + std::to_string(x.split_features[i]);
    }
    w.row(x.method, x.replicate, x.depth, feats, x.test_mse);
  }
  write_file(dir / "asbp.csv", w.str());
  return {"asbp.csv"};
}

std::vector<std::string> write_powell(const PowellResult& r, const std::filesystem::path& dir) {
  CsvWriter w({"n", "d", "method", "mse"});
  for (const auto& x : r.rows) w.row(x.n, x.d, x.method, x.mse);
  write_file(dir / "powell.csv", w.str());
  return {"powell.csv"};
}

}  // namespace detail

}  // namespace mmtree
