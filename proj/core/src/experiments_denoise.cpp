#include <stdexcept>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/forest.hpp"
#include "mmtree/io.hpp"
#include "mmtree/metrics.hpp"
#include "mmtree/synthetic.hpp"

namespace mmtree {

const DenoiseRow& DenoiseResult::find(const std::string& model, const std::string& method,
                                      std::size_t m_try) const {
  for (const auto& r : rows) {
    if (r.model == model && r.method == method && r.m_try == m_try) return r;
  }
  throw std::out_of_range("no denoise row for " + model + "/" + method);
}

DenoiseResult run_denoise(const DenoiseConfig& cfg, const RunOptions& opt) {
  if (cfg.methods.empty() || cfg.m_try.empty()) throw ConfigError("denoise needs methods and m_try values");
  std::vector<SplitCriterion> crits;
  for (const auto& m : cfg.methods) {
    crits.push_back(parse_criterion(m));
    check_compatible(crits.back(), Task::regression);
  }
  const ImageGrid clean = cfg.input.empty() ? make_phantom(cfg.phantom_size, cfg.phantom_size) : load_pgm(cfg.input);
  const Stream root = Stream(opt.seed).derive("denoise");
  const std::vector<double> noisy = add_noise(clean, cfg.sigma, root.derive("noise"));
  const Dataset grid = image_to_dataset(clean);
  const Dataset data({std::vector<double>(grid.feature(0).begin(), grid.feature(0).end()),
                      std::vector<double>(grid.feature(1).begin(), grid.feature(1).end())},
                     noisy, Task::regression, grid.feature_names());
  const std::size_t h = clean.height();
  const std::size_t w = clean.width();

  struct Job {
    std::string model;
    std::size_t method;
    std::size_t m_try;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < crits.size(); ++m) {
    for (std::size_t mt : cfg.m_try) {
      const std::size_t eff = mt == 0 ? data.n_features() : mt;
      if (eff > data.n_features()) throw ConfigError("m_try exceeds the image feature count");
      jobs.push_back({"forest", m, eff});
      if (cfg.single_trees) jobs.push_back({"tree", m, eff});
    }
  }

  DenoiseResult out;
  out.height = h;
  out.width = w;
  out.clean.assign(clean.pixels().begin(), clean.pixels().end());
  out.noisy = noisy;
  {
    const ImageGrid noisy_img = ImageGrid::clamped(h, w, noisy);
    DenoiseRow row;
    row.model = "noisy";
    row.method = "none";
    const MetricReport rep = regression_metrics(clean.pixels(), noisy);
    row.mse = rep.mse;
    row.rmse = rep.rmse;
    row.mae = rep.mae;
    row.r2 = rep.r2;
    row.ssim = ssim(clean, noisy_img);
    out.rows.push_back(row);
    out.images.emplace_back();
  }

  std::vector<DenoiseRow> rows(jobs.size());
  std::vector<std::vector<double>> images(jobs.size());
  // Forests parallelize internally; jobs run in sequence.
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    ForestConfig fc;
    fc.tree.max_depth = cfg.max_depth;
    fc.tree.criterion = crits[job.method];
    fc.m_try = job.m_try;
    fc.threads = opt.threads;
    if (job.model == "forest") {
      fc.n_trees = cfg.n_trees;
      fc.bootstrap = cfg.bootstrap;
    } else {
      fc.n_trees = 1;
      fc.bootstrap = false;
    }
    fc.seed = root.derive(job.model + "/" + cfg.methods[job.method], job.m_try).key();
    const ForestModel f = train_forest(data, fc);
    const ImageGrid rec = ImageGrid::clamped(h, w, predict_forest(f, data));
    const MetricReport rep = image_metrics(clean, rec);
    rows[j] = {job.model, cfg.methods[job.method], job.m_try, rep.mse, rep.rmse, rep.mae, rep.r2, *rep.ssim};
    images[j].assign(rec.pixels().begin(), rec.pixels().end());
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    out.rows.push_back(rows[j]);
    out.images.push_back(std::move(images[j]));
  }
  return out;
}

namespace detail {

std::vector<std::string> write_denoise(const DenoiseResult& r, const DenoiseConfig& cfg,
                                       const std::filesystem::path& dir) {
  CsvWriter w({"model", "method", "m_try", "mse", "rmse", "mae", "r2", "ssim"});
  for (const auto& x : r.rows) {
    w.row(x.model, x.method, x.m_try, x.mse, x.rmse, x.mae, x.r2 ? fmt(*x.r2) : std::string("NA"), x.ssim);
  }
  write_file(dir / "denoise_metrics.csv", w.str());
  std::vector<std::string> files{"denoise_metrics.csv"};
  if (cfg.write_images) {
    auto put = [&](const std::string& name, const std::vector<double>& px) {
      write_pgm(dir / name, ImageGrid::clamped(r.height, r.width, px));
      files.push_back(name);
    };
    put("clean.pgm", r.clean);
    put("noisy.pgm", r.noisy);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (r.rows[i].model == "noisy") continue;
      put(r.rows[i].model + "_" + r.rows[i].method + "_mtry" + std::to_string(r.rows[i].m_try) + ".pgm",
          r.images[i]);
    }
  }
  return files;
}

}  // namespace detail

}  // namespace mmtree
