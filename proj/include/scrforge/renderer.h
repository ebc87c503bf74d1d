#pragma once

#include <cstdint>
#include <vector>

#include "scrforge/geometry.h"
#include "scrforge/image.h"
#include "scrforge/pointcloud.h"
#include "scrforge/scm_io.h"

namespace scrforge {

// One labeled view: color image, per-pixel world coordinates with validity,
// and the camera that produced them.
struct SceneCoordFrame {
  RgbImage rgb;
  SceneCoordMap scmap;
  RigidTransform pose;  // world-to-camera
  CameraIntrinsics intrinsics;
};

struct SplatConfig {
  // World-space point size k in meters; the splat radius in pixels is
  // max(1, round(k * fx / z)).
  double point_size = 0.01;

  int RadiusPx(double fx, double depth) const;
};

// Renders the cloud with a hard nearest-depth z-buffer. Every point in front
// of the camera covers the pixels whose centers lie within its splat radius
// of its projection. Each covered pixel is labeled with the point where its
// center ray meets the splat (a fronto-parallel disc at the point's depth), so
// every valid scene coordinate reprojects onto its own pixel center.
// Throws InvalidArgument for invalid intrinsics.
SceneCoordFrame Render(const ColorPointCloud& cloud, const RigidTransform& pose,
                       const CameraIntrinsics& intr,
                       const SplatConfig& cfg = {});

// Fraction of valid pixels that reproject within `tolerance_px` of their
// center with positive depth. Returns 1 for frames without valid pixels.
struct ReprojectionCheck {
  std::size_t valid_pixels = 0;
  std::size_t consistent_pixels = 0;
  double max_error_px = 0.0;
  bool ok() const { return valid_pixels == consistent_pixels; }
};
ReprojectionCheck CheckReprojection(const SceneCoordFrame& frame,
                                    double tolerance_px = 0.5);

struct PoseSamplerConfig {
  // Camera centers are drawn uniformly inside this box; the z range is
  // further restricted to [min_height, max_height].
  BoundingBox aabb{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  double min_height = 1.0;
  double max_height = 1.6;
  double yaw_min_deg = 0.0;
  double yaw_max_deg = 360.0;
  double max_pitch_deg = 15.0;
  double max_roll_deg = 5.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Cloud bounding box shrunk by `margin` meters per side.
BoundingBox DefaultSamplerAabb(const ColorPointCloud& cloud,
                               double margin = 0.5);

// Deterministic in cfg (including the seed). The world is z-up; a camera with
// zero yaw, pitch and roll looks along +x with image rows pointing down -z.
std::vector<RigidTransform> SamplePoses(const PoseSamplerConfig& cfg,
                                        std::size_t n);

// Yaw of a sampled pose's optical axis about world z, in [0, 360).
double CameraYawDeg(const RigidTransform& pose);

}  // namespace scrforge
