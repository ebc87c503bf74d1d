#include "scrforge/image.h"

#include <png.h>

#include <cstring>

#include "scrforge/error.h"

namespace scrforge {

void WritePng(const std::filesystem::path& path, const RgbImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.data.size() != 3 * image.pixel_count()) {
    throw Error(ErrorCode::kInvalidArgument, "image buffer size mismatch");
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.data.data(), 0,
                               nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kIoError,
                "cannot write " + path.string() + ": " + msg);
  }
}

RgbImage ReadPng(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorCode::kIoError,
                "cannot read " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  RgbImage image(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, image.data.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kIoError,
                "cannot decode " + path.string() + ": " + msg);
  }
  return image;
}

}  // namespace scrforge
