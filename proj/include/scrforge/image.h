#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "scrforge/pointcloud.h"

namespace scrforge {

// 8-bit RGB image, row-major, channel-interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(3 * std::size_t(w) * h, 0) {}

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::uint8_t& at(int x, int y, int c) {
    return data[3 * (std::size_t(y) * width + x) + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[3 * (std::size_t(y) * width + x) + c];
  }
  void set(int x, int y, const Rgb8& rgb) {
    std::uint8_t* p = &data[3 * (std::size_t(y) * width + x)];
    p[0] = rgb[0];
    p[1] = rgb[1];
    p[2] = rgb[2];
  }
  bool operator==(const RgbImage&) const = default;
};

// Per-pixel validity, 1 = valid. Row-major, width * height entries.
using ValidityMask = std::vector<std::uint8_t>;

// Throws IoError.
void WritePng(const std::filesystem::path& path, const RgbImage& image);
// Any PNG is converted to 8-bit RGB. Throws IoError.
RgbImage ReadPng(const std::filesystem::path& path);

}  // namespace scrforge
