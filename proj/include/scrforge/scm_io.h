#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "scrforge/image.h"

namespace scrforge {

// Dense world-coordinate map with validity. Invalid cells hold (0, 0, 0).
struct SceneCoordMap {
  int width = 0;
  int height = 0;
  std::vector<float> xyz;  // width * height * 3, row-major, interleaved
  ValidityMask mask;       // width * height

  SceneCoordMap() = default;
  SceneCoordMap(int w, int h)
      : width(w), height(h), xyz(3 * std::size_t(w) * h, 0.f),
        mask(std::size_t(w) * h, 0) {}

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
  bool valid(int x, int y) const { return mask[index(x, y)] != 0; }
  Eigen::Vector3f at(int x, int y) const {
    const float* p = &xyz[3 * index(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, const Eigen::Vector3f& p) {
    float* dst = &xyz[3 * index(x, y)];
    dst[0] = p.x();
    dst[1] = p.y();
    dst[2] = p.z();
    mask[index(x, y)] = 1;
  }
  std::size_t valid_count() const;
  bool operator==(const SceneCoordMap&) const = default;
};

// SCM1 layout: "SCM1", u32 width, u32 height, u32 channels (3), then
// width*height*3 float32 and width*height mask bytes, all little-endian.
// Throws IoError or ParseError.
void WriteScm(const std::filesystem::path& path, const SceneCoordMap& map);
SceneCoordMap ReadScm(const std::filesystem::path& path);

}  // namespace scrforge
