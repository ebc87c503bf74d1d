#include "scrforge/histmatch.h"

#include <algorithm>
#include <cmath>

#include "scrforge/error.h"

namespace scrforge {

void ChannelCdf::Validate() const {
  for (const auto& ch : values) {
    double prev = 0.0;
    for (double v : ch) {
      if (!(v >= prev && v <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "CDF must be non-decreasing within [0, 1]");
      }
      prev = v;
    }
    if (ch[255] != 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "CDF must end at 1");
    }
  }
}

ChannelCdf ComputeCdf(std::span<const RgbImage> images,
                      std::span<const ValidityMask> masks) {
  if (!masks.empty() && masks.size() != images.size()) {
    throw Error(ErrorCode::kLengthMismatch, "need one mask per image");
  }
  std::array<std::array<std::uint64_t, 256>, 3> counts{};
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const RgbImage& img = images[i];
    const std::size_t n = img.pixel_count();
    if (img.data.size() != 3 * n) {
      throw Error(ErrorCode::kLengthMismatch, "image buffer size mismatch");
    }
    const ValidityMask* mask = masks.empty() ? nullptr : &masks[i];
    if (mask && mask->size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "mask size mismatch");
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (mask && (*mask)[p] == 0) continue;
      for (int c = 0; c < 3; ++c) ++counts[c][img.data[3 * p + c]];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyPool, "no pixels to count");

  ChannelCdf cdf;
  for (int c = 0; c < 3; ++c) {
    std::uint64_t cum = 0;
    for (int i = 0; i < 256; ++i) {
      cum += counts[c][i];
      cdf.values[c][i] =
          static_cast<double>(cum) / static_cast<double>(total);
    }
    cdf.values[c][255] = 1.0;
  }
  return cdf;
}

ChannelCdf ComputeCdf(const RgbImage& image, const ValidityMask* mask) {
  if (mask) {
    return ComputeCdf(std::span<const RgbImage>(&image, 1),
                      std::span<const ValidityMask>(mask, 1));
  }
  return ComputeCdf(std::span<const RgbImage>(&image, 1));
}

IntensityLut BuildMatchLut(const ChannelCdf& source, const ChannelCdf& target) {
  source.Validate();
  target.Validate();
  IntensityLut lut{};
  for (int c = 0; c < 3; ++c) {
    const auto& t = target.values[c];
    for (int i = 0; i < 256; ++i) {
      const auto it = std::lower_bound(t.begin(), t.end(), source.values[c][i]);
      // target ends at 1, so a match always exists.
      lut[c][i] = static_cast<std::uint8_t>(
          std::min<std::ptrdiff_t>(255, it - t.begin()));
    }
  }
  return lut;
}

RgbImage ApplyLut(const RgbImage& image, const IntensityLut& lut,
                  const ValidityMask* mask) {
  RgbImage out = image;
  const std::size_t n = image.pixel_count();
  if (mask && mask->size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "mask size mismatch");
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (mask && (*mask)[p] == 0) continue;
    for (int c = 0; c < 3; ++c) {
      out.data[3 * p + c] = lut[c][image.data[3 * p + c]];
    }
  }
  return out;
}

RgbImage MatchHistogram(const RgbImage& image, const ChannelCdf& source,
                        const ChannelCdf& target, const ValidityMask* mask) {
  return ApplyLut(image, BuildMatchLut(source, target), mask);
}

std::array<double, 3> KsDistance(const ChannelCdf& a, const ChannelCdf& b) {
  std::array<double, 3> d{};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 256; ++i) {
      d[c] = std::max(d[c], std::abs(a.values[c][i] - b.values[c][i]));
    }
  }
  return d;
}

nlohmann::json CdfToJson(const ChannelCdf& cdf) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& ch : cdf.values) channels.push_back(ch);
  return {{"channels", channels}};
}

ChannelCdf CdfFromJson(const nlohmann::json& j) {
  try {
    const auto& channels = j.at("channels");
    if (!channels.is_array() || channels.size() != 3) {
      throw Error(ErrorCode::kParseError, "CDF needs 3 channels");
    }
    ChannelCdf cdf;
    for (int c = 0; c < 3; ++c) {
      if (!channels[c].is_array() || channels[c].size() != 256) {
        throw Error(ErrorCode::kParseError, "CDF channel needs 256 bins");
      }
      for (int i = 0; i < 256; ++i) cdf.values[c][i] = channels[c][i].get<double>();
    }
    cdf.Validate();
    return cdf;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, e.what());
  }
}

}  // namespace scrforge
