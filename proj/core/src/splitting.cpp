#include "mmtree/splitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mmtree/error.hpp"

namespace mmtree {

namespace {

struct CriterionName {
  SplitCriterion tag;
  std::string_view name;
};

constexpr std::array<CriterionName, 10> kNames{{
    {SplitCriterion::variance, "variance"},
    {SplitCriterion::minimax, "minimax"},
    {SplitCriterion::cyclic_minimax, "cyclic_minimax"},
    {SplitCriterion::one_sided_min, "one_sided_min"},
    {SplitCriterion::one_sided_max, "one_sided_max"},
    {SplitCriterion::random_uniform, "random_uniform"},
    {SplitCriterion::random_observed, "random_observed"},
    {SplitCriterion::entropy_sum, "entropy_sum"},
    {SplitCriterion::entropy_minimax, "entropy_minimax"},
    {SplitCriterion::entropy_cyclic_minimax, "entropy_cyclic_minimax"},
}};

long double xlogx(std::size_t n) {
  if (n <= 1) return 0.0L;
  const auto v = static_cast<long double>(n);
  return v * std::log(v);
}

// Welford accumulator; M2 only ever grows, so prefix risks are monotone.
struct Welford {
  std::size_t n = 0;
  long double mean = 0.0L;
  long double m2 = 0.0L;

  void add(double y) {
    ++n;
    const long double delta = static_cast<long double>(y) - mean;
    mean += delta / static_cast<long double>(n);
    const long double inc = delta * (static_cast<long double>(y) - mean);
    if (inc > 0.0L) m2 += inc;
  }
};

double midpoint(double a, double b) {
  double t = a + (b - a) / 2.0;
  if (!(t > a)) t = b;
  return t;
}

ScanResult result_at(const RiskProfile& p, std::size_t c, ScanMode mode) {
  ScanResult r;
  r.threshold = p.thresholds[c];
  r.left_risk = p.left[c];
  r.right_risk = p.right[c];
  r.left_count = p.left_count[c];
  r.right_count = p.size - p.left_count[c];
  switch (mode) {
    case ScanMode::sum: r.criterion_value = r.left_risk + r.right_risk; break;
    case ScanMode::max: r.criterion_value = std::max(r.left_risk, r.right_risk); break;
    case ScanMode::left_only: r.criterion_value = r.left_risk; break;
    case ScanMode::right_only: r.criterion_value = r.right_risk; break;
  }
  return r;
}

SplitDecision to_decision(std::size_t feature, const ScanResult& r) {
  return SplitDecision{feature,      r.threshold,  r.left_risk,  r.right_risk,
                       r.criterion_value, r.left_count, r.right_count};
}

// Child statistics of an arbitrary threshold on `feature`, read off the profile.
SplitDecision decision_for_threshold(const RiskProfile& p, std::size_t feature, double t,
                                     const NodeView& node) {
  const auto order = node.sorted_by(feature);
  const auto& data = node.data();
  std::size_t left = 0;
  while (left < order.size() && data.x(feature, order[left]) < t) ++left;
  const auto it = std::lower_bound(p.left_count.begin(), p.left_count.end(), left);
  const auto c = static_cast<std::size_t>(it - p.left_count.begin());
  ScanResult r = result_at(p, c, ScanMode::sum);
  r.threshold = t;
  return to_decision(feature, r);
}

}  // namespace

std::string_view to_string(SplitCriterion c) {
  for (const auto& e : kNames) {
    if (e.tag == c) return e.name;
  }
  return "unknown";
}

SplitCriterion parse_criterion(std::string_view name) {
  for (const auto& e : kNames) {
    if (e.name == name) return e.tag;
  }
  if (name == "C1") return SplitCriterion::one_sided_min;
  if (name == "C2") return SplitCriterion::one_sided_max;
  if (name == "cyclic") return SplitCriterion::cyclic_minimax;
  throw ConfigError("unknown split criterion '" + std::string(name) + "'");
}

bool is_entropy(SplitCriterion c) {
  return c == SplitCriterion::entropy_sum || c == SplitCriterion::entropy_minimax ||
         c == SplitCriterion::entropy_cyclic_minimax;
}

bool is_cyclic(SplitCriterion c) {
  return c == SplitCriterion::cyclic_minimax || c == SplitCriterion::entropy_cyclic_minimax;
}

bool is_random(SplitCriterion c) {
  return c == SplitCriterion::random_uniform || c == SplitCriterion::random_observed;
}

void check_compatible(SplitCriterion c, Task task) {
  if (is_random(c)) return;
  if (is_entropy(c) && task != Task::classification) {
    throw ConfigError("criterion '" + std::string(to_string(c)) + "' needs classification data");
  }
  if (!is_entropy(c) && task != Task::regression) {
    throw ConfigError("criterion '" + std::string(to_string(c)) + "' needs regression data");
  }
}

double entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("entropy argument outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double entropy_risk(std::size_t count, std::size_t pos) {
  if (pos > count) throw std::domain_error("positive count exceeds node size");
  const long double r = xlogx(count) - xlogx(pos) - xlogx(count - pos);
  return r > 0.0L ? static_cast<double>(r) : 0.0;
}

NodeStats NodeStats::of(const Dataset& data, std::span<const std::uint32_t> members) {
  NodeStats s;
  s.count = members.size();
  if (data.task() == Task::classification) {
    for (std::uint32_t i : members) {
      const double y = data.y(i);
      s.sum_y += y;
      s.sum_y_sq += y * y;
      if (y > 0.0) ++s.pos_count;
    }
    s.risk = entropy_risk(s.count, s.pos_count);
    return s;
  }
  Welford w;
  long double sum = 0.0L;
  long double sq = 0.0L;
  for (std::uint32_t i : members) {
    const double y = data.y(i);
    w.add(y);
    sum += y;
    sq += static_cast<long double>(y) * y;
    if (y > 0.0) ++s.pos_count;
  }
  s.sum_y = static_cast<double>(sum);
  s.sum_y_sq = static_cast<double>(sq);
  s.risk = s.count <= 1 ? 0.0 : static_cast<double>(w.m2);
  return s;
}

NodeStats NodeStats::of(const NodeView& node) { return of(node.data(), node.members()); }

std::vector<double> candidate_thresholds(const NodeView& node, std::size_t feature) {
  if (feature >= node.data().n_features()) throw std::out_of_range("feature index out of range");
  const auto order = node.sorted_by(feature);
  const auto& data = node.data();
  std::vector<double> out;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double a = data.x(feature, order[i - 1]);
    const double b = data.x(feature, order[i]);
    if (a < b) out.push_back(midpoint(a, b));
  }
  return out;
}

RiskProfile risk_profile(const NodeView& node, std::size_t feature) {
  if (feature >= node.data().n_features()) throw std::out_of_range("feature index out of range");
  const auto order = node.sorted_by(feature);
  const auto& data = node.data();
  const std::size_t n = order.size();
  RiskProfile p;
  p.size = n;
  // Boundaries: positions i in [1, n) where the sorted value changes.
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = data.x(feature, order[i - 1]);
    const double b = data.x(feature, order[i]);
    if (a < b) {
      cuts.push_back(i);
      p.thresholds.push_back(midpoint(a, b));
      p.left_count.push_back(i);
    }
  }
  const std::size_t m = cuts.size();
  p.left.assign(m, 0.0);
  p.right.assign(m, 0.0);
  if (m == 0) return p;

  if (data.task() == Task::classification) {
    std::vector<std::size_t> prefix_pos(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix_pos[i + 1] = prefix_pos[i] + (data.y(order[i]) > 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t k = cuts[c];
      p.left[c] = entropy_risk(k, prefix_pos[k]);
      p.right[c] = entropy_risk(n - k, prefix_pos[n] - prefix_pos[k]);
    }
    // The exact sequences are monotone; the running max removes rounding wiggle.
    for (std::size_t c = 1; c < m; ++c) p.left[c] = std::max(p.left[c], p.left[c - 1]);
    for (std::size_t c = m - 1; c-- > 0;) p.right[c] = std::max(p.right[c], p.right[c + 1]);
    return p;
  }

  Welford fwd;
  std::size_t i = 0;
  for (std::size_t c = 0; c < m; ++c) {
    for (; i < cuts[c]; ++i) fwd.add(data.y(order[i]));
    p.left[c] = static_cast<double>(fwd.m2);
  }
  Welford bwd;
  std::size_t j = n;
  for (std::size_t c = m; c-- > 0;) {
    for (; j > cuts[c]; --j) bwd.add(data.y(order[j - 1]));
    p.right[c] = static_cast<double>(bwd.m2);
  }
  return p;
}

ScanResult scan_profile(const RiskProfile& p, ScanMode mode, std::size_t min_child) {
  std::optional<ScanResult> best;
  for (std::size_t c = 0; c < p.candidates(); ++c) {
    if (p.left_count[c] < min_child || p.size - p.left_count[c] < min_child) continue;
    ScanResult r = result_at(p, c, mode);
    if (!best || r.criterion_value < best->criterion_value) best = r;
  }
  if (!best) throw Unsplittable("no admissible threshold");
  return *best;
}

ScanResult scan_feature(const NodeView& node, std::size_t feature, ScanMode mode,
                        std::size_t min_child) {
  return scan_profile(risk_profile(node, feature), mode, min_child);
}

ScanResult minimax_profile(const RiskProfile& p) {
  const std::size_t m = p.candidates();
  if (m == 0) throw Unsplittable("no admissible threshold");
  // First candidate where left >= right; left - right is non-decreasing.
  std::size_t lo = 0;
  std::size_t hi = m;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (p.left[mid] >= p.right[mid]) hi = mid; else lo = mid + 1;
  }
  const std::size_t cross = lo;
  if (cross == 0) return result_at(p, 0, ScanMode::max);
  const double before = p.right[cross - 1];
  if (cross < m && p.left[cross] < before) return result_at(p, cross, ScanMode::max);
  // Optimum lies left of the crossing where max == right, which is non-increasing:
  // the smallest minimizer is the first candidate with right <= before.
  lo = 0;
  hi = cross - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (p.right[mid] <= before) hi = mid; else lo = mid + 1;
  }
  return result_at(p, lo, ScanMode::max);
}

ScanResult minimax_search(const NodeView& node, std::size_t feature) {
  return minimax_profile(risk_profile(node, feature));
}

std::optional<SplitDecision> best_split(const NodeView& node, SplitCriterion criterion,
                                        std::span<const std::size_t> allowed_features,
                                        Stream& rng, std::size_t min_leaf) {
  const Dataset& data = node.data();
  const std::size_t d = data.n_features();
  check_compatible(criterion, data.task());
  if (allowed_features.empty() && !is_cyclic(criterion)) {
    throw ConfigError("allowed feature set is empty");
  }
  for (std::size_t j : allowed_features) {
    if (j >= d) throw std::out_of_range("allowed feature index out of range");
  }

  if (is_cyclic(criterion)) {
    const std::size_t j = node.depth() % d;
    if (node.constant_feature(j)) return std::nullopt;
    return to_decision(j, minimax_search(node, j));
  }

  std::vector<std::size_t> features(allowed_features.begin(), allowed_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  std::erase_if(features, [&](std::size_t j) { return node.constant_feature(j); });
  if (features.empty()) return std::nullopt;

  if (is_random(criterion)) {
    const std::size_t j = features[rng.index(features.size())];
    const RiskProfile p = risk_profile(node, j);
    if (criterion == SplitCriterion::random_observed) {
      const std::size_t c = rng.index(p.candidates());
      return to_decision(j, result_at(p, c, ScanMode::sum));
    }
    const auto order = node.sorted_by(j);
    const double lo = data.x(j, order.front());
    const double hi = data.x(j, order.back());
    double t;
    do {
      t = lo + rng.uniform() * (hi - lo);
    } while (!(t > lo));
    return decision_for_threshold(p, j, t, node);
  }

  std::optional<SplitDecision> best;
  for (std::size_t j : features) {
    const RiskProfile p = risk_profile(node, j);
    try {
      ScanResult r;
      switch (criterion) {
        case SplitCriterion::variance:
        case SplitCriterion::entropy_sum: r = scan_profile(p, ScanMode::sum); break;
        case SplitCriterion::minimax:
        case SplitCriterion::entropy_minimax: r = minimax_profile(p); break;
        case SplitCriterion::one_sided_min: r = scan_profile(p, ScanMode::left_only, min_leaf); break;
        case SplitCriterion::one_sided_max: r = scan_profile(p, ScanMode::right_only, min_leaf); break;
        default: throw std::logic_error("unhandled criterion");
      }
      if (!best || r.criterion_value < best->criterion_value) best = to_decision(j, r);
    } catch (const Unsplittable&) {
    }
  }
  return best;
}

}  // namespace mmtree
