#include "mmtree/metrics.hpp"

#include <cmath>
#include <json.hpp>

#include "mmtree/error.hpp"

namespace mmtree {

MetricReport regression_metrics(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw DataError("metric inputs differ in length");
  if (y.empty()) throw DataError("metric inputs are empty");
  const double n = static_cast<double>(y.size());
  long double se = 0.0L;
  long double ae = 0.0L;
  long double sum = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long double e = static_cast<long double>(y[i]) - yhat[i];
    se += e * e;
    ae += std::abs(e);
    sum += y[i];
  }
  const long double mean = sum / n;
  long double ss = 0.0L;
  for (double v : y) ss += (v - mean) * (v - mean);
  MetricReport r;
  r.mse = static_cast<double>(se / n);
  r.rmse = std::sqrt(r.mse);
  r.mae = static_cast<double>(ae / n);
  const double var = static_cast<double>(ss / n);
  if (var > 0.0) r.r2 = 1.0 - r.mse / var;
  return r;
}

MetricReport image_metrics(const ImageGrid& y, const ImageGrid& yhat) {
  MetricReport r = regression_metrics(y.pixels(), yhat.pixels());
  r.ssim = ssim(y, yhat);
  return r;
}

namespace {

std::vector<double> gaussian_1d(std::size_t window, double sigma) {
  if (window == 0 || !(sigma > 0.0)) throw ConfigError("bad SSIM window");
  const double c = (static_cast<double>(window) - 1.0) / 2.0;
  std::vector<double> g(window);
  double total = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    const double d = static_cast<double>(i) - c;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

}  // namespace

std::vector<double> gaussian_window(std::size_t window, double sigma) {
  const auto g = gaussian_1d(window, sigma);
  std::vector<double> w(window * window);
  for (std::size_t i = 0; i < window; ++i) {
    for (std::size_t j = 0; j < window; ++j) w[i * window + j] = g[i] * g[j];
  }
  return w;
}

namespace {

// Valid-mode separable filter of `img` (h x w) with the 1-D kernel `g`.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                                 const std::vector<double>& g) {
  const std::size_t k = g.size();
  const std::size_t oh = h - k + 1;
  const std::size_t ow = w - k + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += g[t] * img[r * w + c + t];
      rows[r * ow + c] = s;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += g[t] * rows[(r + t) * ow + c];
      out[r * ow + c] = s;
    }
  }
  return out;
}

}  // namespace

double ssim(const ImageGrid& y, const ImageGrid& yhat, const SsimParams& p) {
  if (y.height() != yhat.height() || y.width() != yhat.width()) {
    throw DataError("SSIM inputs differ in shape");
  }
  const std::size_t h = y.height();
  const std::size_t w = y.width();
  if (h < p.window || w < p.window) {
    throw DataError("image smaller than the " + std::to_string(p.window) + "x" +
                    std::to_string(p.window) + " SSIM window");
  }
  const auto g = gaussian_1d(p.window, p.sigma);
  const std::vector<double> a(y.pixels().begin(), y.pixels().end());
  const std::vector<double> b(yhat.pixels().begin(), yhat.pixels().end());
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, h, w, g);
  const auto mu_b = filter_valid(b, h, w, g);
  const auto e_aa = filter_valid(aa, h, w, g);
  const auto e_bb = filter_valid(bb, h, w, g);
  const auto e_ab = filter_valid(ab, h, w, g);
  const double c1 = (p.k1 * p.range) * (p.k1 * p.range);
  const double c2 = (p.k2 * p.range) * (p.k2 * p.range);
  long double total = 0.0L;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return static_cast<double>(total / static_cast<long double>(mu_a.size()));
}

std::string to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["mse"] = r.mse;
  j["rmse"] = r.rmse;
  j["mae"] = r.mae;
  j["r2"] = r.r2 ? nlohmann::ordered_json(*r.r2) : nlohmann::ordered_json(nullptr);
  if (r.ssim) j["ssim"] = *r.ssim;
  return j.dump();
}

}  // namespace mmtree
