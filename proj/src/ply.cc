#include "scrforge/ply.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scrforge/error.h"

namespace scrforge {
namespace {

enum class ScalarType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32,
                        kFloat32, kFloat64 };

std::optional<ScalarType> ParseScalarType(const std::string& name) {
  if (name == "char" || name == "int8") return ScalarType::kInt8;
  if (name == "uchar" || name == "uint8") return ScalarType::kUint8;
  if (name == "short" || name == "int16") return ScalarType::kInt16;
  if (name == "ushort" || name == "uint16") return ScalarType::kUint16;
  if (name == "int" || name == "int32") return ScalarType::kInt32;
  if (name == "uint" || name == "uint32") return ScalarType::kUint32;
  if (name == "float" || name == "float32") return ScalarType::kFloat32;
  if (name == "double" || name == "float64") return ScalarType::kFloat64;
  return std::nullopt;
}

std::size_t ScalarSize(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUint8: return 1;
    case ScalarType::kInt16:
    case ScalarType::kUint16: return 2;
    case ScalarType::kInt32:
    case ScalarType::kUint32:
    case ScalarType::kFloat32: return 4;
    case ScalarType::kFloat64: return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  std::size_t offset = 0;  // byte offset inside a binary record
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  std::size_t record_size = 0;
  bool has_list = false;
};

struct Header {
  PlyFormat format = PlyFormat::kAscii;
  std::vector<Element> elements;
  std::size_t payload_offset = 0;
};

[[noreturn]] void ParseFail(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

Header ParseHeader(const std::string& data) {
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;
  while (true) {
    const std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) ParseFail("PLY header is not terminated");
    std::string line = data.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line != "ply") ParseFail("missing 'ply' magic");
      first = false;
      continue;
    }
    std::istringstream in(line);
    std::string keyword;
    in >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") {
      continue;
    }
    if (keyword == "end_header") break;
    if (keyword == "format") {
      std::string fmt, version;
      in >> fmt >> version;
      if (fmt == "ascii") {
        header.format = PlyFormat::kAscii;
      } else if (fmt == "binary_little_endian") {
        header.format = PlyFormat::kBinaryLittleEndian;
      } else {
        ParseFail("unsupported PLY format '" + fmt + "'");
      }
      saw_format = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      in >> e.name >> count;
      if (in.fail() || count < 0) ParseFail("bad element line: " + line);
      e.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (header.elements.empty()) ParseFail("property before any element");
      Element& e = header.elements.back();
      std::string type;
      in >> type;
      Property p;
      if (type == "list") {
        std::string count_type, item_type;
        in >> count_type >> item_type >> p.name;
        if (!ParseScalarType(count_type) || !ParseScalarType(item_type)) {
          ParseFail("bad list property: " + line);
        }
        p.type = *ParseScalarType(item_type);
        p.is_list = true;
        e.has_list = true;
      } else {
        const auto t = ParseScalarType(type);
        if (!t) ParseFail("unknown property type '" + type + "'");
        p.type = *t;
        in >> p.name;
        p.offset = e.record_size;
        e.record_size += ScalarSize(p.type);
      }
      if (p.name.empty()) ParseFail("property without a name");
      e.properties.push_back(p);
    } else {
      ParseFail("unexpected header line: " + line);
    }
  }
  if (!saw_format) ParseFail("missing format line");
  header.payload_offset = pos;
  return header;
}

template <typename T>
T ReadLittleEndian(const char* src) {
  T value;
  std::memcpy(&value, src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

double ReadBinaryScalar(const char* src, ScalarType t) {
  switch (t) {
    case ScalarType::kInt8: return ReadLittleEndian<std::int8_t>(src);
    case ScalarType::kUint8: return ReadLittleEndian<std::uint8_t>(src);
    case ScalarType::kInt16: return ReadLittleEndian<std::int16_t>(src);
    case ScalarType::kUint16: return ReadLittleEndian<std::uint16_t>(src);
    case ScalarType::kInt32: return ReadLittleEndian<std::int32_t>(src);
    case ScalarType::kUint32: return ReadLittleEndian<std::uint32_t>(src);
    case ScalarType::kFloat32: return ReadLittleEndian<float>(src);
    case ScalarType::kFloat64: return ReadLittleEndian<double>(src);
  }
  return 0.0;
}

// float32 positions are copied bit-for-bit; wider types are narrowed.
float ReadBinaryFloat(const char* src, ScalarType t) {
  if (t == ScalarType::kFloat32) return ReadLittleEndian<float>(src);
  return static_cast<float>(ReadBinaryScalar(src, t));
}

std::uint8_t ToColor(double v) {
  if (!std::isfinite(v)) ParseFail("non-finite color value");
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct VertexLayout {
  std::size_t element_index = 0;
  std::array<std::size_t, 6> props{};  // x y z red green blue
};

VertexLayout FindVertexLayout(const Header& header) {
  VertexLayout layout;
  auto it = std::find_if(header.elements.begin(), header.elements.end(),
                         [](const Element& e) { return e.name == "vertex"; });
  if (it == header.elements.end()) {
    throw Error(ErrorCode::kMissingProperty, "no vertex element");
  }
  layout.element_index = static_cast<std::size_t>(it - header.elements.begin());
  static constexpr std::array<const char*, 6> kNames = {
      "x", "y", "z", "red", "green", "blue"};
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    auto p = std::find_if(it->properties.begin(), it->properties.end(),
                          [&](const Property& prop) {
                            return prop.name == kNames[k];
                          });
    if (p == it->properties.end()) {
      throw Error(ErrorCode::kMissingProperty,
                  std::string("vertex property '") + kNames[k] + "' missing");
    }
    if (p->is_list) ParseFail(std::string(kNames[k]) + " is a list property");
    layout.props[k] = static_cast<std::size_t>(p - it->properties.begin());
  }
  return layout;
}

class AsciiTokenizer {
 public:
  AsciiTokenizer(const std::string& data, std::size_t pos)
      : data_(data), pos_(pos) {}

  std::string_view Next() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(
                                      data_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= data_.size()) ParseFail("truncated ASCII payload");
    const std::size_t start = pos_;
    while (pos_ < data_.size() &&
           !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      ++pos_;
    }
    return std::string_view(data_).substr(start, pos_ - start);
  }

  double NextNumber() { return ParseNumber<double>(Next()); }

  template <typename T>
  static T ParseNumber(std::string_view tok) {
    T v{};
    const auto [ptr, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      ParseFail("bad number '" + std::string(tok) + "'");
    }
    return v;
  }

 private:
  const std::string& data_;
  std::size_t pos_;
};

ColorPointCloud ParseAscii(const std::string& data, const Header& header,
                           const VertexLayout& layout) {
  AsciiTokenizer tok(data, header.payload_offset);
  ColorPointCloud cloud;
  for (std::size_t ei = 0; ei <= layout.element_index; ++ei) {
    const Element& e = header.elements[ei];
    const bool is_vertex = ei == layout.element_index;
    if (is_vertex) cloud.reserve(e.count);
    std::vector<std::string_view> tokens(e.properties.size());
    for (std::size_t r = 0; r < e.count; ++r) {
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        if (e.properties[pi].is_list) {
          const auto n = static_cast<long long>(tok.NextNumber());
          if (n < 0) ParseFail("negative list length");
          for (long long k = 0; k < n; ++k) tok.Next();
        } else {
          tokens[pi] = tok.Next();
        }
      }
      if (!is_vertex) continue;
      const auto& p = layout.props;
      // Parsing straight to float keeps printed float values bit-exact.
      auto f = [&](std::size_t k) {
        return AsciiTokenizer::ParseNumber<float>(tokens[p[k]]);
      };
      auto c = [&](std::size_t k) {
        return ToColor(AsciiTokenizer::ParseNumber<double>(tokens[p[k]]));
      };
      cloud.push_back(Eigen::Vector3f(f(0), f(1), f(2)),
                      Rgb8{c(3), c(4), c(5)});
    }
  }
  return cloud;
}

ColorPointCloud ParseBinary(const std::string& data, const Header& header,
                            const VertexLayout& layout) {
  std::size_t pos = header.payload_offset;
  for (std::size_t ei = 0; ei < layout.element_index; ++ei) {
    const Element& e = header.elements[ei];
    if (e.has_list) {
      ParseFail("list-valued element before vertex data is not supported");
    }
    pos += e.count * e.record_size;
  }
  const Element& v = header.elements[layout.element_index];
  if (v.has_list) ParseFail("vertex element with list properties");
  if (pos > data.size() || (data.size() - pos) / std::max<std::size_t>(
                                                    v.record_size, 1) < v.count) {
    ParseFail("truncated binary payload");
  }
  ColorPointCloud cloud;
  cloud.reserve(v.count);
  const auto& props = v.properties;
  const auto& p = layout.props;
  for (std::size_t r = 0; r < v.count; ++r) {
    const char* rec = data.data() + pos + r * v.record_size;
    auto f = [&](std::size_t k) {
      return ReadBinaryFloat(rec + props[p[k]].offset, props[p[k]].type);
    };
    auto c = [&](std::size_t k) {
      if (props[p[k]].type == ScalarType::kUint8) {
        return static_cast<std::uint8_t>(rec[props[p[k]].offset]);
      }
      return ToColor(ReadBinaryScalar(rec + props[p[k]].offset,
                                      props[p[k]].type));
    };
    cloud.push_back(Eigen::Vector3f(f(0), f(1), f(2)), Rgb8{c(3), c(4), c(5)});
  }
  return cloud;
}

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

}  // namespace

ColorPointCloud LoadPly(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const Header header = ParseHeader(data);
  const VertexLayout layout = FindVertexLayout(header);
  ColorPointCloud cloud = header.format == PlyFormat::kAscii
                              ? ParseAscii(data, header, layout)
                              : ParseBinary(data, header, layout);
  for (const auto& pt : cloud.positions) {
    if (!pt.allFinite()) ParseFail("non-finite vertex coordinate");
  }
  return cloud;
}

void SavePly(const std::filesystem::path& path, const ColorPointCloud& cloud,
             PlyFormat format) {
  cloud.Validate();
  std::string out;
  out += "ply\n";
  out += format == PlyFormat::kAscii ? "format ascii 1.0\n"
                                     : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  if (format == PlyFormat::kAscii) {
    char buf[128];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& p = cloud.positions[i];
      const auto& c = cloud.colors[i];
      // %.9g round-trips any float exactly.
      const int n = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %u %u %u\n",
                                  p.x(), p.y(), p.z(), c[0], c[1], c[2]);
      out.append(buf, static_cast<std::size_t>(n));
    }
  } else {
    out.reserve(out.size() + cloud.size() * 15);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& p = cloud.positions[i];
      AppendLittleEndian(out, p.x());
      AppendLittleEndian(out, p.y());
      AppendLittleEndian(out, p.z());
      out.append(reinterpret_cast<const char*>(cloud.colors[i].data()), 3);
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace scrforge
