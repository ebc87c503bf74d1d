#include "scrforge/pointcloud.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "scrforge/error.h"

namespace scrforge {

void ColorPointCloud::Validate() const {
  if (positions.size() != colors.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "positions and colors differ in length");
  }
  for (const auto& p : positions) {
    if (!p.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite point coordinate");
    }
  }
}

BoundingBox ComputeBoundingBox(const ColorPointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "empty point cloud");
  BoundingBox box{cloud.positions[0].cast<double>(),
                  cloud.positions[0].cast<double>()};
  for (const auto& p : cloud.positions) {
    box.min = box.min.cwiseMin(p.cast<double>());
    box.max = box.max.cwiseMax(p.cast<double>());
  }
  return box;
}

ColorPointCloud TransformCloud(const ColorPointCloud& cloud,
                               const RigidTransform& transform) {
  ColorPointCloud out;
  out.positions.reserve(cloud.size());
  const Eigen::Matrix3d r = transform.rotation().Matrix();
  const Eigen::Vector3d& t = transform.translation();
  for (const auto& p : cloud.positions) {
    out.positions.push_back((r * p.cast<double>() + t).cast<float>());
  }
  out.colors = cloud.colors;
  return out;
}

ColorPointCloud MergeClouds(std::span<const ColorPointCloud> clouds,
                            std::span<const RigidTransform> transforms) {
  if (clouds.size() != transforms.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "need one transform per cloud");
  }
  std::size_t total = 0;
  for (const auto& c : clouds) total += c.size();
  ColorPointCloud out;
  out.reserve(total);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    const auto& cloud = clouds[i];
    if (cloud.positions.size() != cloud.colors.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "positions and colors differ in length");
    }
    const Eigen::Matrix3d r = transforms[i].rotation().Matrix();
    const Eigen::Vector3d& t = transforms[i].translation();
    // An exact identity must leave coordinates bit-identical.
    const bool identity = r == Eigen::Matrix3d::Identity() && t.isZero(0.0);
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      const Eigen::Vector3f& p = cloud.positions[j];
      out.positions.push_back(
          identity ? p : (r * p.cast<double>() + t).cast<float>());
      out.colors.push_back(cloud.colors[j]);
    }
  }
  return out;
}

namespace {

double SquaredDistance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

struct VoxelKeyHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
    std::size_t h = static_cast<std::size_t>(k[0]) * 73856093u;
    h ^= static_cast<std::size_t>(k[1]) * 19349663u;
    h ^= static_cast<std::size_t>(k[2]) * 83492791u;
    return h;
  }
};

}  // namespace

ColorPointCloud VoxelDownsample(const ColorPointCloud& cloud,
                                double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "voxel size must be positive");
  }
  std::unordered_set<std::array<std::int64_t, 3>, VoxelKeyHash> seen;
  seen.reserve(cloud.size());
  ColorPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3f& p = cloud.positions[i];
    const std::array<std::int64_t, 3> key = {
        static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
    if (seen.insert(key).second) out.push_back(p, cloud.colors[i]);
  }
  return out;
}

SpatialIndex::SpatialIndex(std::span<const Eigen::Vector3f> points,
                           std::size_t leaf_size)
    : leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  points_.reserve(points.size());
  for (const auto& p : points) points_.push_back(p.cast<double>());
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    Build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t SpatialIndex::Build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= leaf_size_) return id;

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int dim = 0;
  (hi - lo).maxCoeff(&dim);
  if (hi[dim] == lo[dim]) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][dim] < points_[b][dim];
                   });
  const double split = points_[order_[mid]][dim];
  const std::int32_t left = Build(begin, mid);
  const std::int32_t right = Build(mid, end);
  Node& node = nodes_[id];
  node.split_dim = dim;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return id;
}

NeighborResult SpatialIndex::Nearest(const Eigen::Vector3d& query) const {
  if (points_.empty()) throw Error(ErrorCode::kEmptyIndex, "index is empty");
  NeighborResult best{std::numeric_limits<std::size_t>::max(),
                      std::numeric_limits<double>::infinity()};
  Search(0, query, best);
  return best;
}

void SpatialIndex::Search(std::int32_t node_id, const Eigen::Vector3d& query,
                          NeighborResult& best) const {
  const Node& node = nodes_[node_id];
  if (node.split_dim < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d = SquaredDistance(points_[idx], query);
      if (d < best.squared_distance ||
          (d == best.squared_distance && idx < best.index)) {
        best = {idx, d};
      }
    }
    return;
  }
  // Left holds values <= split, right holds values >= split.
  const double diff = query[node.split_dim] - node.split_value;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  Search(near, query, best);
  // Equality keeps ties on the plane reachable for the lowest-index rule.
  if (diff * diff <= best.squared_distance) Search(far, query, best);
}

}  // namespace scrforge
