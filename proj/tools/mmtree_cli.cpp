// mmtree command-line driver.
//
//   mmtree [--seed S] [--out DIR] [--threads T] [--config FILE] <subcommand> [options]
//
// Exit status: 0 success, 2 configuration error, 3 data error, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <optional>
#include <iostream>

#include "mmtree/error.hpp"
#include "mmtree/experiments.hpp"
#include "mmtree/forest.hpp"
#include "mmtree/io.hpp"
#include "mmtree/tree.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::size_t threads = 1;
  std::string config;
};

json load_config(const Globals& g) {
  if (g.config.empty()) return json::object();
  try {
    json j = json::parse(mmtree::read_file(g.config));
    if (!j.is_object()) throw mmtree::ConfigError("config file must hold a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw mmtree::ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
}

mmtree::ColumnRef column(const std::string& s) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
    return static_cast<std::size_t>(std::stoull(s));
  }
  return s;
}

struct TrainOptions {
  std::string data;
  std::string target = "y";
  std::string task = "regression";
  std::string criterion = "minimax";
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  std::size_t n_trees = 0;
  std::size_t m_try = 0;
  bool bootstrap = true;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainOptions, data, target, task, criterion, max_depth,
                                                min_leaf, n_trees, m_try, bootstrap)

void run_train(const Globals& g, TrainOptions opt, const CLI::App& sub) {
  json cfg = load_config(g);
  const json defaults = TrainOptions{};
  for (const auto& [k, v] : cfg.items()) {
    if (!defaults.contains(k)) throw mmtree::ConfigError("unknown config key '" + k + "'");
  }
  // Command-line flags win over the config file.
  json merged = json(TrainOptions{});
  merged.update(cfg);
  const json flags = opt;
  for (const char* key : {"data", "target", "task", "criterion", "max_depth", "min_leaf", "n_trees", "m_try"}) {
    if (sub.count(std::string("--") + key) > 0) merged[key] = flags[key];
  }
  if (sub.count("--no-bootstrap") > 0) merged["bootstrap"] = false;
  try {
    opt = merged.get<TrainOptions>();
  } catch (const json::exception& e) {
    throw mmtree::ConfigError(std::string("bad train option: ") + e.what());
  }
  if (opt.data.empty()) throw mmtree::ConfigError("train needs --data");

  const mmtree::Dataset data = mmtree::load_csv(opt.data, column(opt.target), mmtree::parse_task(opt.task));
  mmtree::GrowConfig grow;
  grow.max_depth = opt.max_depth;
  grow.min_leaf = opt.min_leaf;
  grow.criterion = mmtree::parse_criterion(opt.criterion);
  grow.seed = g.seed;
  std::string doc;
  if (opt.n_trees == 0) {
    if (opt.m_try != 0) {
      grow.policy = mmtree::FeaturePolicy::random;
      grow.m_try = opt.m_try;
    }
    doc = mmtree::serialize(mmtree::grow(data, grow));
  } else {
    mmtree::ForestConfig fc;
    fc.n_trees = opt.n_trees;
    fc.tree = grow;
    fc.m_try = opt.m_try == 0 ? data.n_features() : opt.m_try;
    fc.bootstrap = opt.bootstrap;
    fc.seed = g.seed;
    fc.threads = g.threads;
    doc = mmtree::serialize(mmtree::train_forest(data, fc));
  }
  const fs::path dir = g.out.empty() ? fs::path("out/train") : fs::path(g.out);
  mmtree::write_file(dir / "model.json", doc + "\n");
  std::cout << (dir / "model.json").string() << "\n";
}

void run_predict(const Globals& g, const std::string& model_path, const std::string& data_path,
                 const std::string& target) {
  if (model_path.empty() || data_path.empty()) throw mmtree::ConfigError("predict needs --model and --data");
  const std::string text = mmtree::read_file(model_path);
  json head;
  try {
    head = json::parse(text);
  } catch (const json::exception& e) {
    throw mmtree::DataError("model file is not valid JSON: " + std::string(e.what()));
  }
  const bool forest = head.value("format", "") == "mmtree-forest";

  const mmtree::CsvTable table = mmtree::read_csv_table(data_path);
  std::optional<std::size_t> skip;
  if (!target.empty()) skip = table.column(column(target));
  std::string out = "prediction\n";
  std::optional<mmtree::TreeModel> tree;
  std::optional<mmtree::ForestModel> ens;
  if (forest) ens = mmtree::load_forest(text); else tree = mmtree::load_tree(text);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<double> x;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (skip && *skip == j) continue;
      x.push_back(mmtree::parse_number(table.rows[i][j], "row " + std::to_string(i + 1) + ", column '" +
                                                             table.header[j] + "'"));
    }
    const double p = forest ? mmtree::predict_forest(*ens, x) : mmtree::predict(*tree, x);
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, p);
    out.append(buf, res.ptr);
    out += '\n';
  }
  const fs::path dir = g.out.empty() ? fs::path("out/predict") : fs::path(g.out);
  mmtree::write_file(dir / "predictions.csv", out);
  std::cout << (dir / "predictions.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax-split decision trees, forests and partition martingales"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--config", g.config, "JSON config file");

  std::string chosen;
  for (const auto& name : mmtree::experiment_names()) {
    app.add_subcommand(name, "Run the " + name + " experiment")->callback([&chosen, name] { chosen = name; });
  }

  TrainOptions train;
  auto* tr = app.add_subcommand("train", "Fit a tree or forest on a CSV file");
  tr->add_option("--data", train.data, "Training CSV");
  tr->add_option("--target", train.target, "Target column name or index");
  tr->add_option("--task", train.task, "regression or classification");
  tr->add_option("--criterion", train.criterion, "Split criterion");
  tr->add_option("--max_depth,--depth", train.max_depth, "Maximum depth K");
  tr->add_option("--min_leaf", train.min_leaf, "Minimum leaf size");
  tr->add_option("--n_trees", train.n_trees, "Forest size (0 = single tree)");
  tr->add_option("--m_try", train.m_try, "Features tried per node (0 = all)");
  tr->add_flag("--no-bootstrap", "Train forest trees on the full sample");

  std::string model_path, data_path, target;
  auto* pr = app.add_subcommand("predict", "Predict with a saved model");
  pr->add_option("--model", model_path, "model.json from train");
  pr->add_option("--data", data_path, "CSV of feature rows");
  pr->add_option("--target", target, "Column to ignore (e.g. a target)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (tr->parsed()) {
      run_train(g, train, *tr);
    } else if (pr->parsed()) {
      run_predict(g, model_path, data_path, target);
    } else {
      const fs::path dir = g.out.empty() ? fs::path("out") / chosen : fs::path(g.out);
      const std::string cfg = load_config(g).dump();
      const auto files = mmtree::run_experiment(chosen, cfg, {g.seed, g.threads}, dir);
      for (const auto& f : files) std::cout << (dir / f).string() << "\n";
    }
  } catch (const mmtree::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mmtree::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
