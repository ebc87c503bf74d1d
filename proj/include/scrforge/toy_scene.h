#pragma once

#include <cstddef>
#include <cstdint>

#include "scrforge/geometry.h"
#include "scrforge/pointcloud.h"

namespace scrforge {

// Axis-aligned closed room [0, width] x [0, length] x [0, height], z up.
struct ToyRoomOptions {
  double width = 6.0;
  double length = 14.0;
  double height = 3.0;
  std::size_t num_points = 200000;
  std::uint64_t seed = 0;
};

// Points are spread over the six faces proportionally to area. Every face has
// its own base color, a linear gradient along both in-face axes and a
// sinusoidal texture, so nearby colors differ across walls.
ColorPointCloud MakeToyRoom(const ToyRoomOptions& options = {});

// 640x360 pinhole camera used for toy renders.
CameraIntrinsics ToyIntrinsics();

}  // namespace scrforge
