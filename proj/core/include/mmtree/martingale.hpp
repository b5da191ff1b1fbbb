#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mmtree/rng.hpp"

namespace mmtree {

/// Finite law: strictly ascending atoms with positive weights summing to one.
class DiscreteLaw {
 public:
  /// Weights are renormalized; they must be positive and sum to 1 within 1e-12
  /// unless `normalize` is set.
  DiscreteLaw(std::vector<double> atoms, std::vector<double> weights, bool normalize = false);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double mean() const;
  double variance() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

enum class MartingaleRule { variance, simons, minimax, median };

std::string_view to_string(MartingaleRule r);
MartingaleRule parse_martingale_rule(std::string_view name);
inline constexpr MartingaleRule kAllRules[] = {MartingaleRule::variance, MartingaleRule::simons,
                                               MartingaleRule::minimax, MartingaleRule::median};

/// Atoms [begin, end) of a law, i.e. the interval [atoms[begin], atoms[end]).
struct Cell {
  std::size_t begin = 0;
  std::size_t end = 0;
  double mass = 0.0;
  double mean = 0.0;
  /// mass * Var(U | cell).
  double sse = 0.0;
  /// Index of the enclosing cell one level up (0 at the root level).
  std::size_t parent = 0;

  bool terminal() const { return end - begin < 2; }
};

Cell make_cell(const DiscreteLaw& law, std::size_t begin, std::size_t end);

struct CellSplit {
  /// First atom of the right child.
  std::size_t boundary = 0;
  /// The split point u: the left child is [a, u), the right [u, b).
  double point = 0.0;
};

/// Throws std::invalid_argument for a terminal cell.
CellSplit split_cell(const DiscreteLaw& law, const Cell& cell, MartingaleRule rule);

struct CellTree {
  MartingaleRule rule = MartingaleRule::variance;
  /// levels[k] is the partition pi_k, cells in ascending order.
  std::vector<std::vector<Cell>> levels;
};

CellTree build_cell_tree(const DiscreteLaw& law, MartingaleRule rule, std::size_t depth);
/// Entry k: sum over pi_k of mass * Var(U | cell).
std::vector<double> mse_curve(const CellTree& tree);
/// Entry k: E[(M_{k+1} - M_k)^2].
std::vector<double> increments(const CellTree& tree);
/// Entry k: mse[k+1] / mse[k] (0 once mse[k] is 0).
std::vector<double> ratio_curve(const std::vector<double>& mse);

enum class WitnessFamily { simons_halfrate, median_halfrate };

struct RateWitness {
  DiscreteLaw law;
  /// Closed-form E[(M_{k+1} - M_k)^2], k = 0..depth-1.
  std::vector<double> predicted;
};

/// Atomic laws on which the Simons / median martingales decay at rate close to
/// 1/2. The infinite law is truncated by collapsing its tail onto one atom at
/// the tail's conditional mean, which leaves M_0..M_{depth + guard} unchanged.
RateWitness rate_witness(WitnessFamily family, double s, std::size_t depth, std::size_t guard = 4);

/// Equal-weight atoms quantile((i + 0.5) / n), i < n.
DiscreteLaw quantile_grid(const std::function<double(double)>& quantile, std::size_t n);
/// Builtin densities on [0, 1] (and "exponential" on [0, inf)):
/// uniform, ramp (1 on [0,0.9] plus 1 + 1e4 (u - 0.9) on [0.9, 1]), power10 (u^10),
/// exponential.
DiscreteLaw builtin_law(std::string_view name, std::size_t n = 1u << 16);
/// Piecewise-constant density on [0, 1] with `bins` random-width bins and
/// heights 10^Unif(-2, 2), as an n-atom quantile grid.
DiscreteLaw random_density_law(Stream& rng, std::size_t n, std::size_t bins = 8);

}  // namespace mmtree
