#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "scrforge/geometry.h"

namespace scrforge {

using Rgb8 = std::array<std::uint8_t, 3>;

// Colored point cloud. positions[i] (meters) and colors[i] describe point i.
struct ColorPointCloud {
  std::vector<Eigen::Vector3f> positions;
  std::vector<Rgb8> colors;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void reserve(std::size_t n) {
    positions.reserve(n);
    colors.reserve(n);
  }
  void push_back(const Eigen::Vector3f& p, const Rgb8& c) {
    positions.push_back(p);
    colors.push_back(c);
  }

  // Throws LengthMismatch if the arrays differ in length and
  // InvalidArgument on a non-finite coordinate.
  void Validate() const;
};

struct BoundingBox {
  Eigen::Vector3d min;
  Eigen::Vector3d max;
};

// Throws EmptyCloud.
BoundingBox ComputeBoundingBox(const ColorPointCloud& cloud);

ColorPointCloud TransformCloud(const ColorPointCloud& cloud,
                               const RigidTransform& transform);

// Concatenates clouds[i] transformed by transforms[i]. Throws LengthMismatch.
ColorPointCloud MergeClouds(std::span<const ColorPointCloud> clouds,
                            std::span<const RigidTransform> transforms);

// Keeps the first point (in cloud order) falling in each voxel.
ColorPointCloud VoxelDownsample(const ColorPointCloud& cloud,
                                double voxel_size = 0.005);

struct NeighborResult {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

// Exact nearest-neighbor search over a fixed set of positions. The index
// copies the positions it is built from.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Eigen::Vector3f> points,
                        std::size_t leaf_size = 16);
  explicit SpatialIndex(const ColorPointCloud& cloud,
                        std::size_t leaf_size = 16)
      : SpatialIndex(std::span<const Eigen::Vector3f>(cloud.positions),
                     leaf_size) {}

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Argmin of squared distance, ties to the lowest point index.
  // Throws EmptyIndex.
  NeighborResult Nearest(const Eigen::Vector3d& query) const;

 private:
  struct Node {
    // Leaf when split_dim < 0; points are order_[begin, end).
    int split_dim = -1;
    double split_value = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t Build(std::uint32_t begin, std::uint32_t end);
  void Search(std::int32_t node, const Eigen::Vector3d& query,
              NeighborResult& best) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

}  // namespace scrforge
