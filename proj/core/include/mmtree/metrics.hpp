#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmtree/dataset.hpp"

namespace mmtree {

struct MetricReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Empty when y is constant.
  std::optional<double> r2;
  std::optional<double> ssim;
};

MetricReport regression_metrics(std::span<const double> y, std::span<const double> yhat);
/// Regression metrics over the pixels plus SSIM.
MetricReport image_metrics(const ImageGrid& y, const ImageGrid& yhat);

struct SsimParams {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;
};

/// Normalized truncated Gaussian weights, row-major window x window.
std::vector<double> gaussian_window(std::size_t window, double sigma);
/// Mean SSIM over all windows fully inside the image (valid mode).
double ssim(const ImageGrid& y, const ImageGrid& yhat, const SsimParams& params = {});

/// Flat JSON object with keys mse, rmse, mae, r2 (null if undefined) and ssim
/// (present for image reports).
std::string to_json(const MetricReport& report);

}  // namespace mmtree
