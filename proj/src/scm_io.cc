#include "scrforge/scm_io.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "scrforge/error.h"

namespace scrforge {
namespace {

constexpr char kMagic[4] = {'S', 'C', 'M', '1'};
constexpr std::size_t kHeaderSize = 16;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  return v;
}

}  // namespace

std::size_t SceneCoordMap::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

void WriteScm(const std::filesystem::path& path, const SceneCoordMap& map) {
  const std::size_t n = std::size_t(map.width) * map.height;
  if (map.width <= 0 || map.height <= 0 || map.xyz.size() != 3 * n ||
      map.mask.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "scene coordinate map size mismatch");
  }
  std::string out(kMagic, 4);
  PutU32(out, static_cast<std::uint32_t>(map.width));
  PutU32(out, static_cast<std::uint32_t>(map.height));
  PutU32(out, 3);
  out.reserve(kHeaderSize + 13 * n);
  for (const float f : map.xyz) {
    PutU32(out, std::bit_cast<std::uint32_t>(f));
  }
  for (const std::uint8_t m : map.mask) out.push_back(m ? 1 : 0);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

SceneCoordMap ReadScm(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string in((std::istreambuf_iterator<char>(file)),
                       std::istreambuf_iterator<char>());
  if (in.size() < kHeaderSize || std::memcmp(in.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kParseError, "not an SCM1 file: " + path.string());
  }
  const std::uint32_t w = GetU32(in, 4);
  const std::uint32_t h = GetU32(in, 8);
  const std::uint32_t channels = GetU32(in, 12);
  if (channels != 3 || w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw Error(ErrorCode::kParseError, "bad SCM1 header in " + path.string());
  }
  const std::size_t n = std::size_t(w) * h;
  if (in.size() != kHeaderSize + 13 * n) {
    throw Error(ErrorCode::kParseError,
                "SCM1 payload size mismatch in " + path.string());
  }
  SceneCoordMap map(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < 3 * n; ++i) {
    map.xyz[i] = std::bit_cast<float>(GetU32(in, kHeaderSize + 4 * i));
  }
  const std::size_t mask_off = kHeaderSize + 12 * n;
  for (std::size_t i = 0; i < n; ++i) {
    map.mask[i] = in[mask_off + i] != 0 ? 1 : 0;
  }
  return map;
}

}  // namespace scrforge
