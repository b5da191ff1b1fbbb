#include "mmtree/forest.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "json_codec.hpp"
#include "mmtree/error.hpp"
#include "mmtree/rng.hpp"

namespace mmtree {

namespace {

void validate(const ForestConfig& cfg, std::size_t d) {
  if (cfg.n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (cfg.m_try < 1 || cfg.m_try > d) {
    throw ConfigError("m_try must be in [1, " + std::to_string(d) + "]");
  }
  if (is_cyclic(cfg.tree.criterion) && cfg.m_try > 1 && cfg.m_try < d) {
    throw ConfigError("cyclic criteria need m_try = 1 or m_try = d");
  }
}

GrowConfig tree_config(const ForestConfig& cfg, std::size_t b) {
  GrowConfig g = cfg.tree;
  g.policy = FeaturePolicy::random;
  g.m_try = cfg.m_try;
  g.seed = Stream(cfg.seed).derive("tree", b).key();
  return g;
}

}  // namespace

ForestModel train_forest(const Dataset& data, const ForestConfig& cfg) {
  validate(cfg, data.n_features());
  check_compatible(cfg.tree.criterion, data.task());
  validate(tree_config(cfg, 0), data.n_features());

  const std::size_t B = cfg.n_trees;
  const std::size_t n = data.n_samples();
  ForestModel model;
  model.config = cfg;
  model.task = data.task();
  model.n_features = data.n_features();
  model.trees.resize(B);
  model.samples.resize(B);

  auto train_one = [&](std::size_t b) {
    const GrowConfig g = tree_config(cfg, b);
    std::vector<std::uint32_t> rows(n);
    if (cfg.bootstrap) {
      Stream draws = Stream(g.seed).derive("bootstrap");
      for (auto& r : rows) r = static_cast<std::uint32_t>(draws.index(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
    }
    model.trees[b] = cfg.bootstrap ? grow(data.resample(rows), g) : grow(data, g);
    model.samples[b] = std::move(rows);
  };

  std::size_t workers = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  workers = std::clamp<std::size_t>(workers, 1, B);
  if (workers == 1) {
    for (std::size_t b = 0; b < B; ++b) train_one(b);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b; (b = next.fetch_add(1)) < B;) {
        try {
          train_one(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return model;
}

double predict_forest(const ForestModel& model, std::span<const double> x) {
  double sum = 0.0;
  for (const TreeModel& t : model.trees) {
    const TreeNode& leaf = t.nodes[t.leaf_index(x)];
    sum += model.task == Task::classification ? leaf.log_odds() : leaf.value;
  }
  return sum / static_cast<double>(model.trees.size());
}

std::vector<double> predict_forest(const ForestModel& model, const Dataset& data) {
  std::vector<double> out(data.n_samples());
  std::vector<double> row(data.n_features());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = data.x(j, i);
    out[i] = predict_forest(model, row);
  }
  return out;
}

int classify_forest(const ForestModel& model, std::span<const double> x) {
  if (model.task != Task::classification) throw ConfigError("classify needs a classification model");
  return predict_forest(model, x) >= 0.0 ? 1 : -1;
}

std::string serialize(const ForestModel& model) {
  using nlohmann::json;
  const ForestConfig& c = model.config;
  json trees = json::array();
  for (std::size_t b = 0; b < model.trees.size(); ++b) {
    trees.push_back(json{{"samples", model.samples[b]}, {"tree", detail::tree_json(model.trees[b])}});
  }
  json doc{{"format", "mmtree-forest"},
           {"version", 1},
           {"task", std::string(to_string(model.task))},
           {"n_features", model.n_features},
           {"config",
            {{"n_trees", c.n_trees},
             {"m_try", c.m_try},
             {"bootstrap", c.bootstrap},
             {"seed", c.seed},
             {"tree", detail::grow_config_json(c.tree)}}},
           {"trees", std::move(trees)}};
  return doc.dump();
}

ForestModel load_forest(const std::string& json_text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(json_text);
    if (doc.at("format") != "mmtree-forest" || doc.at("version") != 1) {
      throw DataError("not a version-1 mmtree forest document");
    }
    ForestModel m;
    m.task = parse_task(doc.at("task").get<std::string>());
    m.n_features = doc.at("n_features").get<std::size_t>();
    const json& c = doc.at("config");
    m.config.n_trees = c.at("n_trees").get<std::size_t>();
    m.config.m_try = c.at("m_try").get<std::size_t>();
    m.config.bootstrap = c.at("bootstrap").get<bool>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.tree = detail::grow_config_from(c.at("tree"));
    for (const json& t : doc.at("trees")) {
      m.samples.push_back(t.at("samples").get<std::vector<std::uint32_t>>());
      m.trees.push_back(detail::tree_from(t.at("tree")));
    }
    if (m.trees.empty()) throw DataError("forest document has no trees");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid forest document: ") + e.what());
  }
}

}  // namespace mmtree
