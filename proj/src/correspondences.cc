#include "scrforge/correspondences.h"

#include <string>

#include "scrforge/error.h"

namespace scrforge {

namespace {

std::vector<Correspondence> Collect(const SceneCoordMap& map, int step,
                                    int cell) {
  std::vector<Correspondence> out;
  for (int y = 0, gy = 0; y < map.height; y += step, ++gy) {
    for (int x = 0, gx = 0; x < map.width; x += step, ++gx) {
      const int sx = step == 1 ? x : x + step / 2;
      const int sy = step == 1 ? y : y + step / 2;
      if (sx >= map.width || sy >= map.height || !map.valid(sx, sy)) continue;
      const Eigen::Vector3f w = map.at(sx, sy);
      if (!w.allFinite()) continue;
      const double px = double(cell) * gx + cell / 2 + 0.5;
      const double py = double(cell) * gy + cell / 2 + 0.5;
      out.push_back({Eigen::Vector2d(px, py), w.cast<double>()});
    }
  }
  return out;
}

}  // namespace

std::vector<Correspondence> SampleCorrespondences(const SceneCoordMap& map,
                                                  int stride) {
  if (stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  }
  return Collect(map, stride, stride);
}

std::vector<Correspondence> GridCorrespondences(const SceneCoordMap& grid,
                                                int cell_stride) {
  if (cell_stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cell stride must be >= 1");
  }
  return Collect(grid, 1, cell_stride);
}

std::vector<Correspondence> CorrespondencesForImage(
    const SceneCoordMap& map, const CameraIntrinsics& intr, int stride) {
  if (map.width == intr.width && map.height == intr.height) {
    return SampleCorrespondences(map, stride);
  }
  if (map.width > 0 && map.width < intr.width) {
    const int cell = intr.width / map.width;
    // The grid may drop a partial last cell (floor) or pad it (ceil).
    const bool fits_w = map.width == intr.width / cell ||
                        map.width == (intr.width + cell - 1) / cell;
    const bool fits_h = map.height == intr.height / cell ||
                        map.height == (intr.height + cell - 1) / cell;
    if (fits_w && fits_h) return GridCorrespondences(map, cell);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "scene coordinate map " + std::to_string(map.width) + "x" +
                  std::to_string(map.height) + " does not match a " +
                  std::to_string(intr.width) + "x" +
                  std::to_string(intr.height) + " image or a grid over it");
}

}  // namespace scrforge
