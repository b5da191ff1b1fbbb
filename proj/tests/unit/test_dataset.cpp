#include <gtest/gtest.h>

#include <cmath>

#include <algorithm>

#include "mmtree/dataset.hpp"
#include "mmtree/error.hpp"
#include "mmtree/rng.hpp"

using namespace mmtree;

TEST(Dataset, SortIndexOrdersEachColumn) {
  Stream s(1);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + s.index(60);
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    for (auto& c : cols)
      for (auto& v : c) v = static_cast<double>(s.index(10));  // many duplicates
    const Dataset d(cols, std::vector<double>(n, 0.0), Task::regression);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto idx = d.sort_index(j);
      std::vector<std::uint32_t> perm(idx.begin(), idx.end());
      std::sort(perm.begin(), perm.end());
      for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(perm[i], i);
      for (std::size_t i = 1; i < n; ++i) ASSERT_LE(d.x(j, idx[i - 1]), d.x(j, idx[i]));
    }
  }
}

TEST(Dataset, TwoElementSort) {
  const Dataset d({{2.0, 1.0}}, {5.0, 4.0}, Task::regression);
  EXPECT_EQ(d.sort_index(0)[0], 1u);
  EXPECT_EQ(d.sort_index(0)[1], 0u);
}

TEST(Dataset, RejectsInvalidInput) {
  EXPECT_THROW(Dataset({{}}, {}, Task::regression), DataError);
  EXPECT_THROW(Dataset({{1.0, 2.0}}, {1.0}, Task::regression), DataError);
  EXPECT_THROW(Dataset({{1.0}}, {0.5}, Task::classification), DataError);
  EXPECT_THROW(Dataset({{std::nan("")}}, {1.0}, Task::regression), DataError);
  EXPECT_NO_THROW(Dataset({{1.0, 2.0}}, {-1.0, 1.0}, Task::classification));
}

TEST(Dataset, ResampleRepeatsRows) {
  const Dataset d({{1.0, 2.0, 3.0}}, {10.0, 20.0, 30.0}, Task::regression);
  const std::vector<std::uint32_t> rows{2, 2, 0};
  const Dataset r = d.resample(rows);
  EXPECT_EQ(r.n_samples(), 3u);
  EXPECT_EQ(r.y(0), 30.0);
  EXPECT_EQ(r.y(1), 30.0);
  EXPECT_EQ(r.x(0, 2), 1.0);
}

TEST(NodeView, SplitPartitionsAndKeepsOrder) {
  const Dataset d({{3, 1, 2, 0, 1}, {0, 1, 0, 1, 0}}, {1, 2, 3, 4, 5}, Task::regression);
  const NodeView root = NodeView::root(d);
  auto [l, r] = root.split(0, 1.5);
  EXPECT_EQ(l.size() + r.size(), 5u);
  EXPECT_EQ(l.depth(), 1u);
  for (auto i : l.members()) EXPECT_LT(d.x(0, i), 1.5);
  for (auto i : r.members()) EXPECT_GE(d.x(0, i), 1.5);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto o = l.sorted_by(j);
    for (std::size_t i = 1; i < o.size(); ++i) EXPECT_LE(d.x(j, o[i - 1]), d.x(j, o[i]));
  }
  EXPECT_TRUE(NodeView::of(d, {0, 2}).constant_feature(1));
  EXPECT_THROW(NodeView::of(d, {1, 1}), DataError);
  EXPECT_THROW(NodeView::of(d, {7}), std::out_of_range);
}

TEST(Image, SinglePixelDataset) {
  const Dataset d = image_to_dataset(ImageGrid(1, 1, {0.7}));
  ASSERT_EQ(d.n_samples(), 1u);
  EXPECT_EQ(d.x(0, 0), 0.5);
  EXPECT_EQ(d.x(1, 0), 0.5);
  EXPECT_EQ(d.y(0), 0.7);
}

TEST(Image, GridCentersAndOrdering) {
  const Dataset d = image_to_dataset(ImageGrid(2, 2, {0.1, 0.2, 0.3, 0.4}));
  ASSERT_EQ(d.n_samples(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(d.x(0, i) == 0.25 || d.x(0, i) == 0.75);
    EXPECT_TRUE(d.x(1, i) == 0.25 || d.x(1, i) == 0.75);
  }
  const Dataset col = image_to_dataset(ImageGrid(2, 1, {0.3, 0.9}));
  EXPECT_EQ(col.y(0), 0.3);
  EXPECT_EQ(col.x(0, 0), 0.25);
  EXPECT_EQ(col.y(1), 0.9);
  EXPECT_EQ(col.x(0, 1), 0.75);
}

TEST(Image, RoundTripClampAndMismatch) {
  Stream s(4);
  std::vector<double> px(12);
  for (auto& v : px) v = s.uniform();
  const ImageGrid img(3, 4, px);
  const Dataset d = image_to_dataset(img);
  EXPECT_EQ(dataset_to_image(d.targets(), 3, 4), img);
  const std::vector<double> pred{1.2, -0.1, 0.5, 0.5};
  const ImageGrid c = dataset_to_image(pred, 2, 2);
  EXPECT_EQ(c.at(0, 0), 1.0);
  EXPECT_EQ(c.at(0, 1), 0.0);
  EXPECT_THROW(dataset_to_image(std::vector<double>(3, 0.0), 2, 2), DataError);
  EXPECT_THROW(ImageGrid(1, 1, {1.5}), DataError);
}
