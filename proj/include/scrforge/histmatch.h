#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "json.hpp"
#include "scrforge/image.h"

namespace scrforge {

// Per-channel empirical CDF over 256 intensity levels: values[c][i] is the
// fraction of counted pixels with channel c <= i. values[c][255] == 1.
struct ChannelCdf {
  std::array<std::array<double, 256>, 3> values{};

  // Throws InvalidArgument unless each channel is non-decreasing within
  // [0, 1] and ends at exactly 1.
  void Validate() const;
  bool operator==(const ChannelCdf&) const = default;
};

using IntensityLut = std::array<std::array<std::uint8_t, 256>, 3>;

// Pools all pixels of all images; when masks is non-empty it must have one
// mask per image and only pixels with a non-zero mask are counted.
// Throws EmptyPool when nothing is counted, LengthMismatch on size errors.
ChannelCdf ComputeCdf(std::span<const RgbImage> images,
                      std::span<const ValidityMask> masks = {});
ChannelCdf ComputeCdf(const RgbImage& image, const ValidityMask* mask = nullptr);

// lut[c][i] = smallest j with target[c][j] >= source[c][i].
IntensityLut BuildMatchLut(const ChannelCdf& source, const ChannelCdf& target);

// Remaps valid pixels through the matching lut; pixels with a zero mask
// entry are copied unchanged.
RgbImage MatchHistogram(const RgbImage& image, const ChannelCdf& source,
                        const ChannelCdf& target,
                        const ValidityMask* mask = nullptr);
RgbImage ApplyLut(const RgbImage& image, const IntensityLut& lut,
                  const ValidityMask* mask = nullptr);

// Kolmogorov-Smirnov distance per channel.
std::array<double, 3> KsDistance(const ChannelCdf& a, const ChannelCdf& b);

// {"channels": [[256 values] x 3]}
nlohmann::json CdfToJson(const ChannelCdf& cdf);
// Throws ParseError.
ChannelCdf CdfFromJson(const nlohmann::json& j);

}  // namespace scrforge
