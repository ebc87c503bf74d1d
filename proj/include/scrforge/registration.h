#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "scrforge/geometry.h"
#include "scrforge/pointcloud.h"

namespace scrforge {

// Least-squares rigid transform T (no scale) minimizing
// sum |dst_i - T(src_i)|^2, from the SVD of the cross-covariance with the
// determinant sign fixed. Throws LengthMismatch, TooFewPoints (N < 3) or
// DegenerateConfiguration (centered src has rank < 2).
RigidTransform UmeyamaRigid(std::span<const Eigen::Vector3d> src,
                            std::span<const Eigen::Vector3d> dst);

struct IcpConfig {
  int max_iterations = 50;
  // Stop once the RMS improvement of one iteration drops below this (m).
  double convergence_threshold = 1e-6;
  double max_correspondence_distance = 0.5;
  // Use at most this many source points, drawn with `seed`; 0 uses all.
  std::size_t max_source_points = 0;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct IcpResult {
  RigidTransform transform;  // maps src into dst's frame
  double rms = 0.0;          // over matched pairs after the final update
  int iterations = 0;
  // rms_history[k] is the matched-pair RMS before update k; the last entry is
  // the final RMS.
  std::vector<double> rms_history;
};

// Point-to-point ICP. Each iteration matches transformed source points to
// their nearest destination point within the max distance and re-solves
// UmeyamaRigid on all matched pairs. Throws EmptyCloud or NoCorrespondences.
IcpResult Icp(const ColorPointCloud& src, const ColorPointCloud& dst,
              const SpatialIndex& dst_index, const RigidTransform& init,
              const IcpConfig& cfg = {});
IcpResult Icp(const ColorPointCloud& src, const ColorPointCloud& dst,
              const RigidTransform& init, const IcpConfig& cfg = {});

}  // namespace scrforge
