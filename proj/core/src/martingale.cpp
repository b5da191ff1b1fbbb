#include "mmtree/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mmtree/error.hpp"

namespace mmtree {

DiscreteLaw::DiscreteLaw(std::vector<double> atoms, std::vector<double> weights, bool normalize)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw DataError("law needs at least one atom");
  if (atoms_.size() != weights_.size()) throw DataError("atom and weight counts differ");
  long double total = 0.0L;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!std::isfinite(atoms_[i])) throw DataError("non-finite atom");
    if (i > 0 && !(atoms_[i] > atoms_[i - 1])) throw DataError("atoms must be strictly ascending");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) throw DataError("weights must be positive");
    total += weights_[i];
  }
  if (normalize) {
    for (double& w : weights_) w = static_cast<double>(w / total);
  } else if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw DataError("weights must sum to 1");
  }
}

double DiscreteLaw::mean() const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += static_cast<long double>(weights_[i]) * atoms_[i];
  return static_cast<double>(s);
}

double DiscreteLaw::variance() const { return make_cell(*this, 0, size()).sse; }

std::string_view to_string(MartingaleRule r) {
  switch (r) {
    case MartingaleRule::variance: return "variance";
    case MartingaleRule::simons: return "simons";
    case MartingaleRule::minimax: return "minimax";
    case MartingaleRule::median: return "median";
  }
  return "variance";
}

MartingaleRule parse_martingale_rule(std::string_view name) {
  for (MartingaleRule r : kAllRules) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown martingale rule '" + std::string(name) + "'");
}

Cell make_cell(const DiscreteLaw& law, std::size_t begin, std::size_t end) {
  if (begin >= end || end > law.size()) throw std::out_of_range("bad cell range");
  const auto& x = law.atoms();
  const auto& w = law.weights();
  long double mass = 0.0L;
  long double first = 0.0L;
  for (std::size_t i = begin; i < end; ++i) {
    mass += w[i];
    first += static_cast<long double>(w[i]) * x[i];
  }
  const long double mean = first / mass;
  long double sse = 0.0L;
  for (std::size_t i = begin; i < end; ++i) {
    const long double dv = x[i] - mean;
    sse += w[i] * dv * dv;
  }
  Cell c;
  c.begin = begin;
  c.end = end;
  c.mass = static_cast<double>(mass);
  c.mean = static_cast<double>(mean);
  c.sse = static_cast<double>(sse);
  return c;
}

namespace {

// Weighted Welford accumulator whose M2 never decreases.
struct WeightedWelford {
  long double w = 0.0L;
  long double mean = 0.0L;
  long double m2 = 0.0L;

  void add(double x, double weight) {
    w += weight;
    const long double delta = x - mean;
    mean += delta * (weight / w);
    const long double inc = weight * delta * (x - mean);
    if (inc > 0.0L) m2 += inc;
  }
};

// Candidate c puts atoms [begin, begin + 1 + c) on the left.
void child_risks(const DiscreteLaw& law, const Cell& cell, std::vector<long double>& left,
                 std::vector<long double>& right) {
  const auto& x = law.atoms();
  const auto& wt = law.weights();
  const std::size_t m = cell.end - cell.begin - 1;
  left.assign(m, 0.0L);
  right.assign(m, 0.0L);
  WeightedWelford f;
  for (std::size_t c = 0; c < m; ++c) {
    f.add(x[cell.begin + c], wt[cell.begin + c]);
    left[c] = f.m2;
  }
  WeightedWelford b;
  for (std::size_t c = m; c-- > 0;) {
    b.add(x[cell.begin + c + 1], wt[cell.begin + c + 1]);
    right[c] = b.m2;
  }
}

std::size_t variance_rule(const std::vector<long double>& L, const std::vector<long double>& R) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < L.size(); ++c) {
    if (L[c] + R[c] <= L[best] + R[best]) best = c;
  }
  return best;
}

// Largest minimizer of max(L, R), found by bisection on the crossing.
std::size_t minimax_rule(const std::vector<long double>& L, const std::vector<long double>& R) {
  const std::size_t m = L.size();
  std::size_t lo = 0;
  std::size_t hi = m;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (L[mid] >= R[mid]) hi = mid; else lo = mid + 1;
  }
  const std::size_t cross = lo;
  if (cross == m) return m - 1;
  if (cross > 0 && L[cross] > R[cross - 1]) return cross - 1;
  // Right of the crossing max == L, non-decreasing; take the end of its plateau.
  const long double v = L[cross];
  lo = cross;
  hi = m - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (L[mid] <= v) lo = mid; else hi = mid - 1;
  }
  return lo;
}

}  // namespace

CellSplit split_cell(const DiscreteLaw& law, const Cell& cell, MartingaleRule rule) {
  if (cell.terminal()) throw std::invalid_argument("terminal cell cannot be split");
  const auto& x = law.atoms();
  const auto& wt = law.weights();
  const std::size_t b = cell.begin;
  const std::size_t e = cell.end;
  std::size_t q = b + 1;
  switch (rule) {
    case MartingaleRule::variance:
    case MartingaleRule::minimax: {
      std::vector<long double> L, R;
      child_risks(law, cell, L, R);
      q = b + 1 + (rule == MartingaleRule::variance ? variance_rule(L, R) : minimax_rule(L, R));
      break;
    }
    case MartingaleRule::simons: {
      long double mass = 0.0L;
      long double first = 0.0L;
      for (std::size_t i = b; i < e; ++i) {
        mass += wt[i];
        first += static_cast<long double>(wt[i]) * x[i];
      }
      const long double mean = first / mass;
      // An atom equal to the mean up to rounding counts as sitting on it and goes right.
      const long double tol = 1e-12L * (static_cast<long double>(x[e - 1]) - x[b]);
      q = b;
      while (q < e && static_cast<long double>(x[q]) < mean - tol) ++q;
      q = std::clamp(q, b + 1, e - 1);
      break;
    }
    case MartingaleRule::median: {
      long double total = 0.0L;
      for (std::size_t i = b; i < e; ++i) total += wt[i];
      const long double tol = 1e-12L * total;
      long double left = 0.0L;
      long double best_gap = 0.0L;
      for (std::size_t i = b + 1; i < e; ++i) {
        left += wt[i - 1];
        const long double gap = std::abs(2.0L * left - total);
        if (i == b + 1 || gap <= best_gap + tol) {
          if (i == b + 1 || gap < best_gap) best_gap = gap;
          q = i;
        }
      }
      break;
    }
  }
  return {q, x[q]};
}

CellTree build_cell_tree(const DiscreteLaw& law, MartingaleRule rule, std::size_t depth) {
  CellTree tree;
  tree.rule = rule;
  tree.levels.push_back({make_cell(law, 0, law.size())});
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& cur = tree.levels.back();
    std::vector<Cell> next;
    next.reserve(cur.size() * 2);
    for (std::size_t p = 0; p < cur.size(); ++p) {
      const Cell& c = cur[p];
      if (c.terminal()) {
        next.push_back(c);
        next.back().parent = p;
        continue;
      }
      const CellSplit s = split_cell(law, c, rule);
      next.push_back(make_cell(law, c.begin, s.boundary));
      next.back().parent = p;
      next.push_back(make_cell(law, s.boundary, c.end));
      next.back().parent = p;
    }
    tree.levels.push_back(std::move(next));
  }
  return tree;
}

std::vector<double> mse_curve(const CellTree& tree) {
  std::vector<double> out;
  for (const auto& level : tree.levels) {
    long double s = 0.0L;
    for (const Cell& c : level) s += c.sse;
    out.push_back(static_cast<double>(s));
  }
  return out;
}

std::vector<double> increments(const CellTree& tree) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < tree.levels.size(); ++k) {
    long double s = 0.0L;
    for (const Cell& c : tree.levels[k + 1]) {
      const long double dv = static_cast<long double>(c.mean) - tree.levels[k][c.parent].mean;
      s += c.mass * dv * dv;
    }
    out.push_back(static_cast<double>(s));
  }
  return out;
}

std::vector<double> ratio_curve(const std::vector<double>& mse) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < mse.size(); ++k) {
    out.push_back(mse[k] > 0.0 ? mse[k + 1] / mse[k] : 0.0);
  }
  return out;
}

RateWitness rate_witness(WitnessFamily family, double s, std::size_t depth, std::size_t guard) {
  const std::size_t T = depth + guard + 1;
  std::vector<double> atoms;
  std::vector<double> weights;
  std::vector<double> predicted;
  if (family == WitnessFamily::simons_halfrate) {
    if (!(s > 0.5 && s < 1.0)) throw ConfigError("simons witness needs s in (1/2, 1)");
    const double r = (1.0 - s) / s;
    // a_J = r + r^2 + ... + r^J carries mass s^{J+1} (1 - s); atoms J >= T merge
    // into a_{T+1}, their conditional mean.
    auto a = [r](std::size_t J) {
      double v = 0.0;
      for (std::size_t j = 1; j <= J; ++j) v += std::pow(r, static_cast<double>(j));
      return v;
    };
    atoms.push_back(-1.0);
    weights.push_back(1.0 - s);
    for (std::size_t J = 0; J < T; ++J) {
      atoms.push_back(a(J));
      weights.push_back(std::pow(s, static_cast<double>(J + 1)) * (1.0 - s));
    }
    atoms.push_back(a(T + 1));
    weights.push_back(std::pow(s, static_cast<double>(T + 1)));
    for (std::size_t k = 0; k < depth; ++k) {
      const auto kk = static_cast<double>(k);
      predicted.push_back(std::pow(1.0 - s, 2.0 * kk + 1.0) * std::pow(s, -(kk + 1.0)));
    }
  } else {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("median witness needs s in (0, 1)");
    // b_k = S_{k-1} - s^{k-1} with S_m = 1 + s + ... + s^{m-1} carries mass 2^{-k};
    // atoms k >= T merge into S_{T-1}.
    auto S = [s](std::size_t m) {
      double v = 0.0;
      for (std::size_t j = 1; j <= m; ++j) v += std::pow(s, static_cast<double>(j - 1));
      return v;
    };
    for (std::size_t k = 1; k < T; ++k) {
      atoms.push_back(S(k - 1) - std::pow(s, static_cast<double>(k - 1)));
      weights.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    }
    atoms.push_back(S(T - 1));
    weights.push_back(std::ldexp(1.0, -static_cast<int>(T - 1)));
    for (std::size_t k = 0; k < depth; ++k) {
      const auto kk = static_cast<double>(k);
      predicted.push_back(std::ldexp(1.0, -static_cast<int>(k)) * std::pow(s, 2.0 * kk));
    }
  }
  return {DiscreteLaw(std::move(atoms), std::move(weights), true), std::move(predicted)};
}

DiscreteLaw quantile_grid(const std::function<double(double)>& quantile, std::size_t n) {
  if (n < 1) throw ConfigError("grid needs at least one atom");
  std::vector<double> atoms(n);
  for (std::size_t i = 0; i < n; ++i) atoms[i] = quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  return DiscreteLaw(std::move(atoms), std::move(weights), true);
}

DiscreteLaw builtin_law(std::string_view name, std::size_t n) {
  if (name == "uniform") return quantile_grid([](double p) { return p; }, n);
  if (name == "power10") return quantile_grid([](double p) { return std::pow(p, 1.0 / 11.0); }, n);
  if (name == "exponential") return quantile_grid([](double p) { return -std::log1p(-p); }, n);
  if (name == "ramp") {
    // Unnormalized CDF: u on [0, 0.9]; 0.9 + v + 5000 v^2 with v = u - 0.9 above.
    constexpr double Z = 51.0;
    return quantile_grid(
        [](double p) {
          const double c = p * Z;
          if (c <= 0.9) return c;
          const double rest = c - 0.9;
          return 0.9 + 2.0 * rest / (1.0 + std::sqrt(1.0 + 20000.0 * rest));
        },
        n);
  }
  throw ConfigError("unknown density '" + std::string(name) + "'");
}

DiscreteLaw random_density_law(Stream& rng, std::size_t n, std::size_t bins) {
  if (bins < 1) throw ConfigError("density needs at least one bin");
  std::vector<double> edges{0.0, 1.0};
  for (std::size_t i = 1; i < bins; ++i) edges.push_back(rng.uniform());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const std::size_t m = edges.size() - 1;
  std::vector<double> heights(m);
  std::vector<double> cdf(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    heights[i] = std::pow(10.0, rng.uniform(-2.0, 2.0));
    cdf[i + 1] = cdf[i] + heights[i] * (edges[i + 1] - edges[i]);
  }
  const double Z = cdf[m];
  return quantile_grid(
      [&](double p) {
        const double c = p * Z;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), c) - cdf.begin());
        i = std::clamp<std::size_t>(i, 1, m) - 1;
        return std::min(edges[i] + (c - cdf[i]) / heights[i], edges[i + 1]);
      },
      n);
}

}  // namespace mmtree
