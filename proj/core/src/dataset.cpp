#include "mmtree/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmtree/error.hpp"

namespace mmtree {

std::string_view to_string(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task parse_task(std::string_view name) {
  if (name == "regression") return Task::regression;
  if (name == "classification") return Task::classification;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

Dataset::Dataset(std::vector<std::vector<double>> columns, std::vector<double> targets, Task task,
                 std::vector<std::string> feature_names)
    : n_samples_(targets.size()),
      n_features_(columns.size()),
      task_(task),
      targets_(std::move(targets)),
      feature_names_(std::move(feature_names)) {
  if (n_samples_ == 0) {
    throw DataError("dataset has no samples");
  }
  if (n_features_ == 0) {
    throw DataError("dataset has no features");
  }
  if (n_samples_ > UINT32_MAX) {
    throw DataError("dataset too large");
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < n_features_; ++j) feature_names_.push_back("x" + std::to_string(j));
  } else if (feature_names_.size() != n_features_) {
    throw DataError("feature name count does not match column count");
  }
  values_.reserve(n_samples_ * n_features_);
  for (std::size_t j = 0; j < n_features_; ++j) {
    if (columns[j].size() != n_samples_) {
      throw DataError("column " + std::to_string(j) + " has " + std::to_string(columns[j].size()) +
                      " values, expected " + std::to_string(n_samples_));
    }
    for (std::size_t i = 0; i < n_samples_; ++i) {
      if (!std::isfinite(columns[j][i])) {
        throw DataError("non-finite feature value at sample " + std::to_string(i) + ", feature " +
                        std::to_string(j));
      }
    }
    values_.insert(values_.end(), columns[j].begin(), columns[j].end());
  }
  for (std::size_t i = 0; i < n_samples_; ++i) {
    const double t = targets_[i];
    if (!std::isfinite(t)) {
      throw DataError("non-finite target at sample " + std::to_string(i));
    }
    if (task_ == Task::classification && t != -1.0 && t != 1.0) {
      throw DataError("classification target at sample " + std::to_string(i) +
                      " is not -1 or +1");
    }
  }

  sort_index_.resize(n_samples_ * n_features_);
  for (std::size_t j = 0; j < n_features_; ++j) {
    auto first = sort_index_.begin() + static_cast<std::ptrdiff_t>(j * n_samples_);
    auto last = first + static_cast<std::ptrdiff_t>(n_samples_);
    std::iota(first, last, 0U);
    const double* col = values_.data() + j * n_samples_;
    std::stable_sort(first, last, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, std::vector<double> targets,
                           Task task) {
  if (rows.empty()) {
    throw DataError("dataset has no samples");
  }
  if (rows.size() != targets.size()) {
    throw DataError("row count does not match target count");
  }
  const std::size_t d = rows.front().size();
  std::vector<std::vector<double>> columns(d, std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw DataError("row " + std::to_string(i) + " has the wrong number of features");
    }
    for (std::size_t j = 0; j < d; ++j) columns[j][i] = rows[i][j];
  }
  return Dataset(std::move(columns), std::move(targets), task);
}

std::span<const double> Dataset::feature(std::size_t j) const {
  if (j >= n_features_) throw std::out_of_range("feature index out of range");
  return {values_.data() + j * n_samples_, n_samples_};
}

std::span<const std::uint32_t> Dataset::sort_index(std::size_t j) const {
  if (j >= n_features_) throw std::out_of_range("feature index out of range");
  return {sort_index_.data() + j * n_samples_, n_samples_};
}

std::vector<double> Dataset::row(std::size_t sample) const {
  std::vector<double> r(n_features_);
  for (std::size_t j = 0; j < n_features_; ++j) r[j] = x(j, sample);
  return r;
}

Dataset Dataset::resample(std::span<const std::uint32_t> indices) const {
  std::vector<std::vector<double>> columns(n_features_, std::vector<double>(indices.size()));
  std::vector<double> targets(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::uint32_t i = indices[k];
    if (i >= n_samples_) throw std::out_of_range("resample index out of range");
    for (std::size_t j = 0; j < n_features_; ++j) columns[j][k] = x(j, i);
    targets[k] = targets_[i];
  }
  return Dataset(std::move(columns), std::move(targets), task_, feature_names_);
}

// ---------------------------------------------------------------------------

NodeView NodeView::root(const Dataset& data) {
  NodeView node(data, 0);
  node.members_.resize(data.n_samples());
  std::iota(node.members_.begin(), node.members_.end(), 0U);
  node.orders_.reserve(data.n_features());
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    const auto idx = data.sort_index(j);
    node.orders_.emplace_back(idx.begin(), idx.end());
  }
  return node;
}

NodeView NodeView::of(const Dataset& data, std::vector<std::uint32_t> members, std::size_t depth) {
  if (members.empty()) {
    throw DataError("node has no members");
  }
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw DataError("node members are not distinct");
  }
  if (members.back() >= data.n_samples()) {
    throw std::out_of_range("node member out of range");
  }
  NodeView node(data, depth);
  node.members_ = std::move(members);
  node.orders_.reserve(data.n_features());
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    auto order = node.members_;
    const auto col = data.feature(j);
    std::stable_sort(order.begin(), order.end(),
                     [&col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    node.orders_.push_back(std::move(order));
  }
  return node;
}

std::span<const std::uint32_t> NodeView::sorted_by(std::size_t feature) const {
  if (feature >= orders_.size()) throw std::out_of_range("feature index out of range");
  return orders_[feature];
}

bool NodeView::constant_targets() const {
  const double first = data_->y(members_.front());
  return std::all_of(members_.begin(), members_.end(),
                     [&](std::uint32_t i) { return data_->y(i) == first; });
}

bool NodeView::constant_feature(std::size_t feature) const {
  const auto order = sorted_by(feature);
  return data_->x(feature, order.front()) == data_->x(feature, order.back());
}

bool NodeView::constant_features() const {
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    if (!constant_feature(j)) return false;
  }
  return true;
}

std::pair<NodeView, NodeView> NodeView::split(std::size_t feature, double threshold) const {
  if (feature >= orders_.size()) throw std::out_of_range("feature index out of range");
  NodeView left(*data_, depth_ + 1);
  NodeView right(*data_, depth_ + 1);
  const auto goes_left = [&](std::uint32_t i) { return data_->x(feature, i) < threshold; };
  for (std::uint32_t i : members_) {
    (goes_left(i) ? left.members_ : right.members_).push_back(i);
  }
  if (left.members_.empty() || right.members_.empty()) {
    throw std::logic_error("split produced an empty child");
  }
  left.orders_.resize(orders_.size());
  right.orders_.resize(orders_.size());
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    left.orders_[j].reserve(left.members_.size());
    right.orders_[j].reserve(right.members_.size());
    for (std::uint32_t i : orders_[j]) {
      (goes_left(i) ? left.orders_[j] : right.orders_[j]).push_back(i);
    }
  }
  return {std::move(left), std::move(right)};
}

NodeView NodeView::advanced() const {
  NodeView next = *this;
  ++next.depth_;
  return next;
}

// ---------------------------------------------------------------------------

ImageGrid::ImageGrid(std::size_t height, std::size_t width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height_ == 0 || width_ == 0) {
    throw DataError("image must have at least one pixel");
  }
  if (pixels_.size() != height_ * width_) {
    throw DataError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                    std::to_string(height_) + "x" + std::to_string(width_));
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("pixel intensity outside [0, 1]");
    }
  }
}

ImageGrid ImageGrid::clamped(std::size_t height, std::size_t width, std::vector<double> values) {
  for (double& v : values) {
    if (std::isnan(v)) throw DataError("NaN pixel value");
    v = std::clamp(v, 0.0, 1.0);
  }
  return ImageGrid(height, width, std::move(values));
}

Dataset image_to_dataset(const ImageGrid& image) {
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  std::vector<std::vector<double>> columns(2, std::vector<double>(h * w));
  std::vector<double> targets(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      columns[0][i] = (static_cast<double>(r) + 0.5) / static_cast<double>(h);
      columns[1][i] = (static_cast<double>(c) + 0.5) / static_cast<double>(w);
      targets[i] = image.at(r, c);
    }
  }
  return Dataset(std::move(columns), std::move(targets), Task::regression, {"row", "col"});
}

ImageGrid dataset_to_image(std::span<const double> predictions, std::size_t height, std::size_t width) {
  if (predictions.size() != height * width) {
    throw DataError("prediction count " + std::to_string(predictions.size()) + " does not match " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  return ImageGrid::clamped(height, width, {predictions.begin(), predictions.end()});
}

}  // namespace mmtree
