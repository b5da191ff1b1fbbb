#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/io.hpp"
#include "mmtree/splitting.hpp"
#include "mmtree/synthetic.hpp"
#include "mmtree/tree.hpp"

namespace mmtree {

const EcpSummary& EcpResult::find(const std::string& noise, const std::string& method) const {
  for (const auto& s : summary) {
    if (s.noise == noise && s.method == method) return s;
  }
  throw std::out_of_range("no ecp summary for " + noise + "/" + method);
}

EcpResult run_ecp(const EcpConfig& cfg, const RunOptions& opt) {
  if (cfg.n < 2) throw ConfigError("ecp needs n >= 2");
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (cfg.methods.empty() || cfg.noises.empty()) throw ConfigError("ecp needs methods and noise laws");
  std::vector<SplitCriterion> crits;
  for (const auto& m : cfg.methods) {
    crits.push_back(parse_criterion(m));
    check_compatible(crits.back(), Task::regression);
  }
  std::vector<detail::NoiseLaw> laws;
  for (const auto& nz : cfg.noises) laws.push_back(detail::parse_noise(nz));

  const Stream root = Stream(opt.seed).derive("ecp");
  const std::size_t R = cfg.replicates;
  const std::size_t M = crits.size();
  // proportions[(noise * R + replicate) * M + method]
  std::vector<double> props(laws.size() * R * M);
  detail::parallel_for(laws.size() * R, opt.threads, [&](std::size_t job) {
    const std::size_t z = job / R;
    const std::size_t r = job % R;
    Stream s = root.derive(cfg.noises[z], r);
    std::vector<double> x(cfg.n), y(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      x[i] = s.uniform();
      y[i] = laws[z].draw(s);
    }
    const Dataset data({x}, y, Task::regression);
    const NodeView node = NodeView::root(data);
    const std::size_t feature = 0;
    for (std::size_t m = 0; m < M; ++m) {
      Stream split_rng = root.derive("split/" + cfg.methods[m], job);
      const auto dec = best_split(node, crits[m], std::span(&feature, 1), split_rng);
      double p = 0.0;
      if (dec) {
        p = static_cast<double>(std::min(dec->left_count, dec->right_count)) / static_cast<double>(cfg.n);
      }
      props[job * M + m] = p;
    }
  });

  EcpResult out;
  for (std::size_t z = 0; z < laws.size(); ++z) {
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<double> v;
      for (std::size_t r = 0; r < R; ++r) {
        const double p = props[(z * R + r) * M + m];
        out.rows.push_back({cfg.noises[z], cfg.methods[m], r, p});
        v.push_back(p);
      }
      const auto below = std::count_if(v.begin(), v.end(), [&](double p) { return p < cfg.threshold; });
      out.summary.push_back({cfg.noises[z], cfg.methods[m], detail::median(v),
                             static_cast<double>(below) / static_cast<double>(R)});
    }
  }
  return out;
}

LeafSizeResult run_leaf_size(const LeafSizeConfig& cfg, const RunOptions& opt) {
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  std::vector<SplitCriterion> crits;
  for (const auto& m : cfg.methods) {
    crits.push_back(parse_criterion(m));
    check_compatible(crits.back(), Task::regression);
  }
  const Stream root = Stream(opt.seed).derive("leafsize");
  const std::size_t R = cfg.replicates;
  const std::size_t K = cfg.max_depth;
  const std::size_t M = crits.size();
  std::vector<LeafSizeRow> rows(cfg.sigmas.size() * R * M * (K + 1));
  detail::parallel_for(cfg.sigmas.size() * R, opt.threads, [&](std::size_t job) {
    const std::size_t si = job / R;
    const std::size_t r = job % R;
    GeneratorSpec spec;
    spec.generator = "piecewise";
    spec.n = cfg.n;
    spec.sigma = cfg.sigmas[si];
    const auto gen = gen_synthetic(spec, root.derive("data", job).key());
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t k = 0; k <= K; ++k) {
        GrowConfig g;
        g.max_depth = k;
        g.min_leaf = cfg.min_leaf;
        g.criterion = crits[m];
        g.seed = root.derive("tree", job).key();
        const auto rep = partition_report(grow(gen.data, g));
        rows[(job * M + m) * (K + 1) + k] = {cfg.sigmas[si], cfg.methods[m], k, r,
                                             rep.leaf_count, rep.mean_leaf_size, rep.sd_leaf_size};
      }
    }
  });
  LeafSizeResult out;
  out.rows = rows;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t k = 0; k <= K; ++k) {
        double mean = 0.0, sd = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          const auto& row = rows[((si * R + r) * M + m) * (K + 1) + k];
          mean += row.mean;
          sd += row.sd;
        }
        out.summary.push_back({cfg.sigmas[si], cfg.methods[m], k, mean / static_cast<double>(R),
                               sd / static_cast<double>(R)});
      }
    }
  }
  return out;
}

namespace detail {

std::vector<std::string> write_ecp(const EcpResult& r, const std::filesystem::path& dir) {
  CsvWriter rows({"noise", "method", "replicate", "proportion"});
  for (const auto& x : r.rows) rows.row(x.noise, x.method, x.replicate, x.proportion);
  CsvWriter sum({"noise", "method", "median", "frac_below_0.05"});
  for (const auto& s : r.summary) sum.row(s.noise, s.method, s.median, s.frac_below);
  write_file(dir / "ecp.csv", rows.str());
  write_file(dir / "ecp_summary.csv", sum.str());
  return {"ecp.csv", "ecp_summary.csv"};
}

std::vector<std::string> write_leaf_size(const LeafSizeResult& r, const std::filesystem::path& dir) {
  CsvWriter rows({"sigma", "method", "depth", "replicate", "leaf_count", "mean_leaf_size", "sd_leaf_size"});
  for (const auto& x : r.rows) rows.row(x.sigma, x.method, x.depth, x.replicate, x.leaf_count, x.mean, x.sd);
  CsvWriter sum({"sigma", "method", "depth", "mean_leaf_size", "sd_leaf_size"});
  for (const auto& s : r.summary) sum.row(s.sigma, s.method, s.depth, s.mean, s.sd);
  write_file(dir / "leafsize.csv", rows.str());
  write_file(dir / "leafsize_summary.csv", sum.str());
  return {"leafsize.csv", "leafsize_summary.csv"};
}

}  // namespace detail

}  // namespace mmtree
