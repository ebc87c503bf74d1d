#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "scrforge/geometry.h"

namespace scrforge {

// A 2D-3D match: continuous pixel coordinates (pixel (x, y) spans
// [x, x + 1) x [y, y + 1)) and a world point in meters.
struct Correspondence {
  Eigen::Vector2d pixel;
  Eigen::Vector3d world;
};

// Minimal absolute pose from three correspondences. The three-ray distance
// system is reduced to a quartic whose real roots come from a companion
// matrix; each root gives camera-frame points that are aligned to the world
// triangle. Every returned pose reprojects all three points within 1e-6 px.
// Throws DegenerateGeometry (triangle area <= 1e-9 m^2 or repeated pixels)
// or NoRealSolution.
std::vector<RigidTransform> P3PSolve(const std::array<Correspondence, 3>& c,
                                     const CameraIntrinsics& intr);

// Pixel distance between the projection of c.world under pose and c.pixel;
// +inf when the point is not in front of the camera.
double ReprojectionError(const RigidTransform& pose,
                         const CameraIntrinsics& intr,
                         const Correspondence& c);

}  // namespace scrforge
