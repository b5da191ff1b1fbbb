#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mmtree {

enum class Task { regression, classification };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

/// Immutable numeric design matrix with targets.
///
/// Features are stored column-major. For every feature a sort index is built
/// at construction: a permutation of sample indices ordering the column
/// ascending, ties broken by sample index. Classification targets must be
/// exactly -1 or +1.
class Dataset {
 public:
  Dataset(std::vector<std::vector<double>> columns, std::vector<double> targets, Task task,
          std::vector<std::string> feature_names = {});

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<double> targets, Task task);

  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_features() const { return n_features_; }
  Task task() const { return task_; }

  double x(std::size_t feature, std::size_t sample) const {
    return values_[feature * n_samples_ + sample];
  }
  double y(std::size_t sample) const { return targets_[sample]; }

  std::span<const double> feature(std::size_t j) const;
  std::span<const double> targets() const { return targets_; }
  std::span<const std::uint32_t> sort_index(std::size_t j) const;
  std::vector<double> row(std::size_t sample) const;
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  /// Row-selected copy (indices may repeat, e.g. a bootstrap draw).
  Dataset resample(std::span<const std::uint32_t> indices) const;

 private:
  std::size_t n_samples_ = 0;
  std::size_t n_features_ = 0;
  Task task_ = Task::regression;
  std::vector<double> values_;
  std::vector<double> targets_;
  std::vector<std::uint32_t> sort_index_;
  std::vector<std::string> feature_names_;
};

/// A tree node's sample: member indices into a dataset plus the partition level.
///
/// Member lists are kept ordered by every feature so split search never sorts;
/// `split` partitions each ordering stably.
class NodeView {
 public:
  static NodeView root(const Dataset& data);
  static NodeView of(const Dataset& data, std::vector<std::uint32_t> members, std::size_t depth = 0);

  const Dataset& data() const { return *data_; }
  std::size_t size() const { return members_.size(); }
  std::size_t depth() const { return depth_; }
  /// Ascending sample indices.
  std::span<const std::uint32_t> members() const { return members_; }
  /// Members ordered by (x_feature, sample index).
  std::span<const std::uint32_t> sorted_by(std::size_t feature) const;

  bool constant_targets() const;
  bool constant_feature(std::size_t feature) const;
  bool constant_features() const;

  /// Children {x_feature < threshold} and {x_feature >= threshold} at depth + 1.
  std::pair<NodeView, NodeView> split(std::size_t feature, double threshold) const;
  /// Same members one level deeper (an unsplit cell persisting in the next partition).
  NodeView advanced() const;

 private:
  NodeView(const Dataset& data, std::size_t depth) : data_(&data), depth_(depth) {}

  const Dataset* data_;
  std::vector<std::uint32_t> members_;
  std::vector<std::vector<std::uint32_t>> orders_;
  std::size_t depth_ = 0;
};

/// Row-major grayscale image with intensities in [0, 1].
class ImageGrid {
 public:
  ImageGrid(std::size_t height, std::size_t width, std::vector<double> pixels);
  /// Same as the constructor but clamps values into [0, 1] first.
  static ImageGrid clamped(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  std::span<const double> pixels() const { return pixels_; }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> pixels_;
};

/// One sample per pixel: features ((row + 0.5) / H, (col + 0.5) / W), target = intensity.
Dataset image_to_dataset(const ImageGrid& image);
/// Inverse of image_to_dataset's sample order; values are clamped into [0, 1].
ImageGrid dataset_to_image(std::span<const double> predictions, std::size_t height, std::size_t width);

}  // namespace mmtree
