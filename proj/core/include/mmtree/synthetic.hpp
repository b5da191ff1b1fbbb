#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mmtree/dataset.hpp"
#include "mmtree/rng.hpp"

namespace mmtree {

/// Parameters for gen_synthetic. Only the fields relevant to `generator` are read.
///
/// generator  | features          | target
/// -----------|-------------------|------------------------------------------
/// sine       | Unif(0,1)         | sin(2 pi 2^p x) + sigma * N(0,1)
/// noise      | Unif(0,1)         | N(0,1), or Student t(dof) when noise_law = "t"
/// piecewise  | Unif(0,1)         | piecewise_signal(x) + sigma * N(0,1)
/// asbp       | Unif([-1,1]^d)    | x_1 + ... + x_{d-1} + |x_d| + sigma * N(0,1)
/// powell     | Unif([0,1]^d)     | powell(x) + sigma * N(0,1), d % 4 == 0
/// additive-tv| Unif([0,1]^d)     | sum_i g_i(x_i) + sigma * N(0,1), g_i random
///            |                   | continuous piecewise linear with `knots` interior knots
struct GeneratorSpec {
  std::string generator = "sine";
  std::size_t n = 1000;
  std::size_t d = 1;
  int p = 1;
  double sigma = 0.0;
  std::string noise_law = "normal";
  double dof = 3.0;
  std::size_t knots = 4;
};

/// Continuous piecewise-linear function on [0, 1], constant-extended outside.
struct PiecewiseLinear {
  std::vector<double> knots;   // ascending, knots.front() == 0, knots.back() == 1
  std::vector<double> values;  // value at each knot

  double operator()(double x) const;
  double total_variation() const;
};

struct SyntheticData {
  Dataset data;
  /// Noise-free signal at each sample (all zeros for the pure-noise generator).
  std::vector<double> truth;
  /// Exact total variation of the additive signal; only set for additive-tv.
  double total_variation = 0.0;
  /// Per-coordinate components for additive-tv.
  std::vector<PiecewiseLinear> components;
  std::function<double(std::span<const double>)> signal;
};

void validate(const GeneratorSpec& spec);
SyntheticData gen_synthetic(const GeneratorSpec& spec, std::uint64_t seed);

double powell(std::span<const double> x);
double asbp_signal(std::span<const double> x);
double piecewise_signal(double x);

/// Smooth test image in [0, 1]: a dim background with an ellipse, a rectangle and a
/// horizontal gradient stripe.
ImageGrid make_phantom(std::size_t height, std::size_t width);
/// Pixels plus i.i.d. N(0, sigma^2) noise; the result is not clamped.
std::vector<double> add_noise(const ImageGrid& image, double sigma, Stream stream);

}  // namespace mmtree
