#pragma once

#include <filesystem>

#include "scrforge/pointcloud.h"

namespace scrforge {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

// Reads the vertex element of a PLY 1.0 file (ASCII or binary little-endian).
// x, y, z and red, green, blue may use any scalar property type; other vertex
// properties and elements after the vertex element are ignored.
// Throws IoError, ParseError or MissingProperty.
ColorPointCloud LoadPly(const std::filesystem::path& path);

// Writes float x, y, z and uchar red, green, blue. Throws IoError.
void SavePly(const std::filesystem::path& path, const ColorPointCloud& cloud,
             PlyFormat format = PlyFormat::kBinaryLittleEndian);

}  // namespace scrforge
