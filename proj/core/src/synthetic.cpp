#include "mmtree/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmtree/error.hpp"

namespace mmtree {

double PiecewiseLinear::operator()(double x) const {
  if (x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - knots.begin());
  const double t = (x - knots[k - 1]) / (knots[k] - knots[k - 1]);
  return values[k - 1] + t * (values[k] - values[k - 1]);
}

double PiecewiseLinear::total_variation() const {
  double tv = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) tv += std::abs(values[k] - values[k - 1]);
  return tv;
}

double powell(std::span<const double> x) {
  if (x.size() % 4 != 0) throw ConfigError("powell dimension must be a multiple of 4");
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); i += 4) {
    const double a = x[i] + 10.0 * x[i + 1];
    const double b = x[i + 2] - x[i + 3];
    const double c = x[i + 1] - 2.0 * x[i + 2];
    const double e = x[i] - x[i + 3];
    f += a * a + 5.0 * b * b + std::pow(c, 4) + 10.0 * std::pow(e, 4);
  }
  return f;
}

double asbp_signal(std::span<const double> x) {
  double f = std::abs(x.back());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) f += x[i];
  return f;
}

double piecewise_signal(double x) {
  if (x >= 0.0 && x < 1.0 / 3.0) return std::sin(x);
  if (x >= 1.0 / 3.0 && x < 2.0 / 3.0) return -2.0 * x;
  return 0.0;
}

void validate(const GeneratorSpec& spec) {
  static const char* known[] = {"sine", "noise", "piecewise", "asbp", "powell", "additive-tv"};
  if (std::find(std::begin(known), std::end(known), spec.generator) == std::end(known)) {
    throw ConfigError("unknown generator '" + spec.generator + "'");
  }
  if (spec.n < 1) throw ConfigError("generator n must be at least 1");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw ConfigError("sigma must be >= 0");
  if (spec.d < 1) throw ConfigError("dimension must be at least 1");
  if (spec.generator == "sine" && (spec.p < 0 || spec.p > 30)) {
    throw ConfigError("sine frequency exponent p must be in [0, 30]");
  }
  if (spec.generator == "noise") {
    if (spec.noise_law != "normal" && spec.noise_law != "t") {
      throw ConfigError("noise law must be 'normal' or 't'");
    }
    if (spec.noise_law == "t" && !(spec.dof > 0.0)) {
      throw ConfigError("Student t degrees of freedom must be positive");
    }
  }
  if (spec.generator == "asbp" && spec.d < 2) throw ConfigError("asbp needs d >= 2");
  if (spec.generator == "powell" && spec.d % 4 != 0) {
    throw ConfigError("powell dimension must be a multiple of 4");
  }
}

SyntheticData gen_synthetic(const GeneratorSpec& spec, std::uint64_t seed) {
  validate(spec);
  const Stream root(seed);
  Stream xs = root.derive("x");
  Stream noise = root.derive("noise");
  const std::string& g = spec.generator;

  std::size_t d = spec.d;
  if (g == "sine" || g == "noise" || g == "piecewise") d = 1;
  const double lo = g == "asbp" ? -1.0 : 0.0;

  std::vector<PiecewiseLinear> components;
  double tv = 0.0;
  if (g == "additive-tv") {
    Stream shape = root.derive("shape");
    for (std::size_t j = 0; j < d; ++j) {
      PiecewiseLinear c;
      c.knots.push_back(0.0);
      for (std::size_t k = 0; k < spec.knots; ++k) c.knots.push_back(shape.uniform());
      c.knots.push_back(1.0);
      std::sort(c.knots.begin(), c.knots.end());
      c.knots.erase(std::unique(c.knots.begin(), c.knots.end()), c.knots.end());
      for (std::size_t k = 0; k < c.knots.size(); ++k) c.values.push_back(shape.uniform(-1.0, 1.0));
      tv += c.total_variation();
      components.push_back(std::move(c));
    }
  }

  std::function<double(std::span<const double>)> signal;
  if (g == "sine") {
    const double freq = 2.0 * std::numbers::pi * std::ldexp(1.0, spec.p);
    signal = [freq](std::span<const double> x) { return std::sin(freq * x[0]); };
  } else if (g == "noise") {
    signal = [](std::span<const double>) { return 0.0; };
  } else if (g == "piecewise") {
    signal = [](std::span<const double> x) { return piecewise_signal(x[0]); };
  } else if (g == "asbp") {
    signal = [](std::span<const double> x) { return asbp_signal(x); };
  } else if (g == "powell") {
    signal = [](std::span<const double> x) { return powell(x); };
  } else {
    signal = [components](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t j = 0; j < components.size(); ++j) s += components[j](x[j]);
      return s;
    };
  }

  const std::size_t n = spec.n;
  std::vector<std::vector<double>> columns(d, std::vector<double>(n));
  std::vector<double> truth(n);
  std::vector<double> targets(n);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = lo + (1.0 - lo) * xs.uniform();
      columns[j][i] = row[j];
    }
    truth[i] = signal(row);
    double eps;
    if (g == "noise") {
      eps = spec.noise_law == "t" ? noise.student_t(spec.dof) : noise.normal();
    } else {
      eps = spec.sigma > 0.0 ? spec.sigma * noise.normal() : 0.0;
    }
    targets[i] = truth[i] + eps;
  }
  return SyntheticData{Dataset(std::move(columns), std::move(targets), Task::regression),
                       std::move(truth), tv, std::move(components), std::move(signal)};
}

ImageGrid make_phantom(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ConfigError("phantom size must be positive");
  std::vector<double> px(height * width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / static_cast<double>(height);
      const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(width);
      double v = 0.15;
      if (y > 0.72 && y < 0.9) v = 0.2 + 0.6 * x;
      const double ex = (x - 0.38) / 0.25;
      const double ey = (y - 0.4) / 0.18;
      if (ex * ex + ey * ey < 1.0) v = 0.85;
      if (x > 0.62 && x < 0.88 && y > 0.12 && y < 0.55) v = 0.5;
      px[r * width + c] = v;
    }
  }
  return ImageGrid(height, width, std::move(px));
}

std::vector<double> add_noise(const ImageGrid& image, double sigma, Stream stream) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  std::vector<double> out(image.pixels().begin(), image.pixels().end());
  for (double& v : out) v += sigma * stream.normal();
  return out;
}

}  // namespace mmtree
