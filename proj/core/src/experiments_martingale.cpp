#include <optional>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/io.hpp"
#include "mmtree/martingale.hpp"

namespace mmtree {

MartingaleResult run_martingale(const MartingaleConfig& cfg, const RunOptions&) {
  if (cfg.rules.empty()) throw ConfigError("martingale needs at least one rule");
  std::vector<MartingaleRule> rules;
  for (const auto& r : cfg.rules) rules.push_back(parse_martingale_rule(r));
  std::optional<DiscreteLaw> law;
  if (!cfg.atoms.empty()) {
    const CsvTable t = read_csv_table(cfg.atoms);
    const std::size_t a = t.column(std::string("atom"));
    const std::size_t w = t.column(std::string("weight"));
    std::vector<double> atoms, weights;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      atoms.push_back(parse_number(t.rows[i][a], "row " + std::to_string(i + 1) + ", atom"));
      weights.push_back(parse_number(t.rows[i][w], "row " + std::to_string(i + 1) + ", weight"));
    }
    law.emplace(std::move(atoms), std::move(weights), true);
  } else {
    law.emplace(builtin_law(cfg.density, cfg.grid));
  }
  MartingaleResult out;
  out.rules = cfg.rules;
  for (MartingaleRule r : rules) {
    const auto curve = mse_curve(build_cell_tree(*law, r, cfg.max_depth));
    out.ratio.push_back(ratio_curve(curve));
    out.mse.push_back(curve);
  }
  return out;
}

namespace detail {

std::vector<std::string> write_martingale(const MartingaleResult& r, const std::filesystem::path& dir) {
  std::vector<std::string> header{"depth"};
  header.insert(header.end(), r.rules.begin(), r.rules.end());
  CsvWriter mse(header);
  CsvWriter ratio(header);
  auto emit = [&](CsvWriter& w, const std::vector<std::vector<double>>& cols) {
    for (std::size_t k = 0; k < cols.front().size(); ++k) {
      std::string line = std::to_string(k);
      for (const auto& c : cols) line += "," + fmt(c[k]);
      w.row(line);
    }
  };
  emit(mse, r.mse);
  emit(ratio, r.ratio);
  write_file(dir / "martingale_mse.csv", mse.str());
  write_file(dir / "martingale_ratio.csv", ratio.str());
  return {"martingale_mse.csv", "martingale_ratio.csv"};
}

}  // namespace detail

}  // namespace mmtree
