#include "mmtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_codec.hpp"
#include "mmtree/error.hpp"

namespace mmtree {

std::string_view to_string(FeaturePolicy p) {
  switch (p) {
    case FeaturePolicy::all: return "all";
    case FeaturePolicy::fixed: return "fixed";
    case FeaturePolicy::random: return "random";
  }
  return "all";
}

FeaturePolicy parse_feature_policy(std::string_view name) {
  if (name == "all") return FeaturePolicy::all;
  if (name == "fixed") return FeaturePolicy::fixed;
  if (name == "random") return FeaturePolicy::random;
  throw ConfigError("unknown feature policy '" + std::string(name) + "'");
}

void validate(const GrowConfig& cfg, std::size_t n_features) {
  if (cfg.min_leaf < 1) throw ConfigError("min_leaf must be at least 1");
  if (cfg.max_depth > 60) throw ConfigError("max_depth must be at most 60");
  if (cfg.policy == FeaturePolicy::fixed) {
    if (cfg.features.empty()) throw ConfigError("fixed feature subset is empty");
    for (std::size_t j : cfg.features) {
      if (j >= n_features) throw ConfigError("fixed feature index out of range");
    }
  }
  if (cfg.policy == FeaturePolicy::random) {
    if (cfg.m_try < 1 || cfg.m_try > n_features) {
      throw ConfigError("m_try must be in [1, " + std::to_string(n_features) + "]");
    }
    if (is_cyclic(cfg.criterion) && cfg.m_try > 1 && cfg.m_try < n_features) {
      throw ConfigError("cyclic criteria need m_try = 1 or m_try = d");
    }
  }
}

double TreeNode::log_odds() const {
  const double eta = (static_cast<double>(pos_count) + 0.5) / (static_cast<double>(count) + 1.0);
  return std::log(eta / (1.0 - eta));
}

std::size_t TreeModel::leaf_index(std::span<const double> x) const {
  if (x.size() != n_features) {
    throw DataError("expected " + std::to_string(n_features) + " features, got " +
                    std::to_string(x.size()));
  }
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& nd = nodes[i];
    i = static_cast<std::size_t>(x[nd.feature] < nd.threshold ? nd.left : nd.right);
  }
  return i;
}

double TreeModel::predict_at_depth(std::span<const double> x, std::size_t k) const {
  if (x.size() != n_features) {
    throw DataError("expected " + std::to_string(n_features) + " features, got " +
                    std::to_string(x.size()));
  }
  std::size_t i = 0;
  while (!nodes[i].is_leaf() && nodes[i].level < k) {
    const TreeNode& nd = nodes[i];
    i = static_cast<std::size_t>(x[nd.feature] < nd.threshold ? nd.left : nd.right);
  }
  return nodes[i].value;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct Active {
  NodeView view;
  std::size_t id;
};

TreeNode make_node(const NodeView& view, std::size_t depth, std::size_t level) {
  const NodeStats s = NodeStats::of(view);
  TreeNode n;
  n.value = s.mean();
  n.count = s.count;
  n.pos_count = s.pos_count;
  n.risk = s.risk;
  n.depth = depth;
  n.level = level;
  return n;
}

// Partial Fisher-Yates: m distinct features from [0, d), returned ascending.
std::vector<std::size_t> draw_features(std::size_t d, std::size_t m, Stream& rng) {
  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.index(d - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

TreeModel grow(const Dataset& data, const GrowConfig& cfg) {
  validate(cfg, data.n_features());
  check_compatible(cfg.criterion, data.task());
  const std::size_t d = data.n_features();
  const std::size_t K = cfg.max_depth;
  const double inv_n = 1.0 / static_cast<double>(data.n_samples());

  // A per-node random subset of size one forces the dimension, so the cyclic
  // schedule has no say; it reduces to the plain minimax rule on that feature.
  SplitCriterion criterion = cfg.criterion;
  if (cfg.policy == FeaturePolicy::random && cfg.m_try == 1) {
    if (criterion == SplitCriterion::cyclic_minimax) criterion = SplitCriterion::minimax;
    if (criterion == SplitCriterion::entropy_cyclic_minimax) criterion = SplitCriterion::entropy_minimax;
  }

  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), 0);

  TreeModel model;
  model.task = data.task();
  model.n_features = d;
  model.n_samples = data.n_samples();
  model.config = cfg;

  Stream rng = Stream(cfg.seed).derive("grow");
  std::vector<Active> frontier;
  frontier.push_back({NodeView::root(data), 0});
  model.nodes.push_back(make_node(frontier.front().view, 0, 0));

  double settled_risk = 0.0;  // leaves that stopped before the current level
  double settled_max = 0.0;
  for (std::size_t k = 0;; ++k) {
    double total = settled_risk;
    double largest = settled_max;
    for (const Active& a : frontier) {
      total += model.nodes[a.id].risk;
      largest = std::max(largest, model.nodes[a.id].risk);
    }
    model.risk_trace.push_back(total * inv_n);
    model.max_risk_trace.push_back(largest * inv_n);
    if (k == K) {
      for (const Active& a : frontier) model.nodes[a.id].level = k;
      break;
    }
    model.split_features.emplace_back();

    std::vector<Active> next;
    for (Active& a : frontier) {
      TreeNode& node = model.nodes[a.id];
      const NodeView& v = a.view;
      const bool stop = v.constant_targets() || v.constant_features() || v.size() <= cfg.min_leaf;
      std::optional<SplitDecision> split;
      if (!stop) {
        std::vector<std::size_t> drawn;
        std::span<const std::size_t> allowed = all;
        if (cfg.policy == FeaturePolicy::fixed) {
          allowed = cfg.features;
        } else if (cfg.policy == FeaturePolicy::random) {
          drawn = draw_features(d, cfg.m_try, rng);
          allowed = drawn;
        }
        split = best_split(v, criterion, allowed, rng, cfg.min_leaf);
        if (!split) {
          next.push_back({v.advanced(), a.id});
          continue;
        }
      }
      if (stop) {
        node.level = k;
        settled_risk += node.risk;
        settled_max = std::max(settled_max, node.risk);
        continue;
      }
      auto [lv, rv] = v.split(split->feature, split->threshold);
      node.feature = split->feature;
      node.threshold = split->threshold;
      node.level = k;
      const std::size_t depth = node.depth + 1;
      model.split_features.back().push_back(split->feature);
      const auto left_id = model.nodes.size();
      model.nodes.push_back(make_node(lv, depth, k + 1));
      model.nodes.push_back(make_node(rv, depth, k + 1));
      model.nodes[a.id].left = static_cast<std::int32_t>(left_id);
      model.nodes[a.id].right = static_cast<std::int32_t>(left_id + 1);
      next.push_back({std::move(lv), left_id});
      next.push_back({std::move(rv), left_id + 1});
    }
    frontier = std::move(next);
  }
  return model;
}

double predict(const TreeModel& model, std::span<const double> x) {
  return model.nodes[model.leaf_index(x)].value;
}

std::vector<double> predict(const TreeModel& model, const Dataset& data) {
  std::vector<double> out(data.n_samples());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(model, data.row(i));
  return out;
}

Classification classify(const TreeModel& model, std::span<const double> x) {
  if (model.task != Task::classification) throw ConfigError("classify needs a classification model");
  const TreeNode& leaf = model.nodes[model.leaf_index(x)];
  return {leaf.label(), leaf.log_odds()};
}

const std::vector<double>& risk_trace(const TreeModel& model) { return model.risk_trace; }

PartitionReport partition_report(const TreeModel& model) {
  PartitionReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  struct Item {
    std::size_t id;
    std::vector<double> lo, hi;
  };
  std::vector<Item> stack{{0, std::vector<double>(model.n_features, -inf),
                           std::vector<double>(model.n_features, inf)}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const TreeNode& n = model.nodes[it.id];
    if (n.is_leaf()) {
      rep.leaves.push_back({n.depth, n.count, n.risk, std::move(it.lo), std::move(it.hi)});
      continue;
    }
    Item l{static_cast<std::size_t>(n.left), it.lo, it.hi};
    Item r{static_cast<std::size_t>(n.right), std::move(it.lo), std::move(it.hi)};
    l.hi[n.feature] = n.threshold;
    r.lo[n.feature] = n.threshold;
    stack.push_back(std::move(r));
    stack.push_back(std::move(l));
  }
  rep.leaf_count = rep.leaves.size();
  const double L = static_cast<double>(rep.leaf_count);
  double sum = 0.0;
  for (const auto& lf : rep.leaves) sum += static_cast<double>(lf.count);
  rep.mean_leaf_size = sum / L;
  double ss = 0.0;
  for (const auto& lf : rep.leaves) {
    const double dv = static_cast<double>(lf.count) - rep.mean_leaf_size;
    ss += dv * dv;
  }
  rep.sd_leaf_size = std::sqrt(ss / L);
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

json grow_config_json(const GrowConfig& cfg) {
  return json{{"max_depth", cfg.max_depth},
              {"min_leaf", cfg.min_leaf},
              {"criterion", std::string(to_string(cfg.criterion))},
              {"policy", std::string(to_string(cfg.policy))},
              {"features", cfg.features},
              {"m_try", cfg.m_try},
              {"seed", cfg.seed}};
}

GrowConfig grow_config_from(const json& j) {
  GrowConfig cfg;
  cfg.max_depth = j.at("max_depth").get<std::size_t>();
  cfg.min_leaf = j.at("min_leaf").get<std::size_t>();
  cfg.criterion = parse_criterion(j.at("criterion").get<std::string>());
  cfg.policy = parse_feature_policy(j.at("policy").get<std::string>());
  cfg.features = j.at("features").get<std::vector<std::size_t>>();
  cfg.m_try = j.at("m_try").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json tree_json(const TreeModel& m) {
  json nodes = json::array();
  for (const TreeNode& n : m.nodes) {
    nodes.push_back(json::array({n.left, n.right, n.feature, n.threshold, n.value, n.count,
                                 n.pos_count, n.risk, n.depth, n.level}));
  }
  return json{{"format", "mmtree-tree"},
              {"version", 1},
              {"task", std::string(to_string(m.task))},
              {"n_features", m.n_features},
              {"n_samples", m.n_samples},
              {"config", grow_config_json(m.config)},
              {"risk_trace", m.risk_trace},
              {"max_risk_trace", m.max_risk_trace},
              {"split_features", m.split_features},
              {"node_fields", {"left", "right", "feature", "threshold", "value", "count",
                               "pos_count", "risk", "depth", "level"}},
              {"nodes", std::move(nodes)}};
}

TreeModel tree_from(const json& j) {
  if (j.at("format") != "mmtree-tree" || j.at("version") != 1) {
    throw DataError("not a version-1 mmtree tree document");
  }
  TreeModel m;
  m.task = parse_task(j.at("task").get<std::string>());
  m.n_features = j.at("n_features").get<std::size_t>();
  m.n_samples = j.at("n_samples").get<std::size_t>();
  m.config = grow_config_from(j.at("config"));
  m.risk_trace = j.at("risk_trace").get<std::vector<double>>();
  m.max_risk_trace = j.at("max_risk_trace").get<std::vector<double>>();
  m.split_features = j.at("split_features").get<std::vector<std::vector<std::size_t>>>();
  for (const json& a : j.at("nodes")) {
    TreeNode n;
    n.left = a.at(0).get<std::int32_t>();
    n.right = a.at(1).get<std::int32_t>();
    n.feature = a.at(2).get<std::size_t>();
    n.threshold = a.at(3).get<double>();
    n.value = a.at(4).get<double>();
    n.count = a.at(5).get<std::size_t>();
    n.pos_count = a.at(6).get<std::size_t>();
    n.risk = a.at(7).get<double>();
    n.depth = a.at(8).get<std::size_t>();
    n.level = a.at(9).get<std::size_t>();
    m.nodes.push_back(n);
  }
  const auto size = static_cast<std::int32_t>(m.nodes.size());
  if (size == 0) throw DataError("tree document has no nodes");
  for (std::int32_t i = 0; i < size; ++i) {
    const TreeNode& n = m.nodes[static_cast<std::size_t>(i)];
    const bool leaf = n.left == TreeNode::npos && n.right == TreeNode::npos;
    const bool ok = leaf || (n.left > i && n.right > i && n.left < size && n.right < size &&
                             n.feature < m.n_features);
    if (!ok) throw DataError("tree document has an invalid node " + std::to_string(i));
  }
  return m;
}

}  // namespace detail

std::string serialize(const TreeModel& model) { return detail::tree_json(model).dump(); }

TreeModel load_tree(const std::string& json_text) {
  try {
    return detail::tree_from(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid tree document: ") + e.what());
  }
}

}  // namespace mmtree
