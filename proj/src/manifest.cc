#include "scrforge/manifest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scrforge/error.h"

namespace scrforge {

using nlohmann::json;

namespace {

[[noreturn]] void Fail(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

double GetNumber(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
    Fail(std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

template <std::size_t N>
std::array<double, N> GetArray(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != N) {
    Fail(std::string("field '") + key + "' must be an array of " +
         std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[key][i].is_number()) Fail(std::string("non-numeric entry in ") + key);
    out[i] = j[key][i].get<double>();
  }
  return out;
}

}  // namespace

json PoseToJson(const RigidTransform& pose) {
  const Rotation& r = pose.rotation();
  const Eigen::Vector3d& t = pose.translation();
  return json{{"q", {r.w(), r.x(), r.y(), r.z()}}, {"t", {t.x(), t.y(), t.z()}}};
}

RigidTransform PoseFromJson(const json& j) {
  if (!j.is_object()) Fail("pose must be an object");
  const auto q = GetArray<4>(j, "q");
  const auto t = GetArray<3>(j, "t");
  const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] +
                                q[3] * q[3]);
  if (!(std::abs(norm - 1.0) <= 1e-6)) Fail("pose quaternion is not normalized");
  for (double v : t) {
    if (!std::isfinite(v)) Fail("non-finite pose translation");
  }
  return RigidTransform(Rotation(q[0], q[1], q[2], q[3]),
                        Eigen::Vector3d(t[0], t[1], t[2]));
}

json IntrinsicsToJson(const CameraIntrinsics& intr) {
  return json{{"fx", intr.fx}, {"fy", intr.fy},       {"cx", intr.cx},
              {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
}

CameraIntrinsics IntrinsicsFromJson(const json& j) {
  CameraIntrinsics k;
  k.fx = GetNumber(j, "fx");
  k.fy = GetNumber(j, "fy");
  k.cx = GetNumber(j, "cx");
  k.cy = GetNumber(j, "cy");
  const double w = GetNumber(j, "width");
  const double h = GetNumber(j, "height");
  if (w != std::floor(w) || h != std::floor(h) || w < 1 || h < 1 ||
      w > 1 << 16 || h > 1 << 16) {
    Fail("intrinsics width/height must be positive integers");
  }
  k.width = static_cast<int>(w);
  k.height = static_cast<int>(h);
  try {
    k.Validate();
  } catch (const Error& e) {
    Fail(e.what());
  }
  return k;
}

CameraIntrinsics ReadIntrinsicsFile(const std::filesystem::path& path) {
  return IntrinsicsFromJson(ReadJsonFile(path));
}

json RecordToJson(const ManifestRecord& record) {
  json j;
  j["id"] = record.id;
  j["rgb"] = record.rgb;
  j["scmap"] = record.scmap ? json(*record.scmap) : json(nullptr);
  j["pose"] = record.pose ? PoseToJson(*record.pose) : json(nullptr);
  j["intrinsics"] = IntrinsicsToJson(record.intrinsics);
  return j;
}

ManifestRecord RecordFromJson(const json& j) {
  if (!j.is_object()) Fail("manifest record must be an object");
  ManifestRecord r;
  if (!j.contains("id") || !j["id"].is_string()) Fail("record needs a string id");
  r.id = j["id"].get<std::string>();
  if (!j.contains("rgb") || !j["rgb"].is_string()) Fail("record needs an rgb path");
  r.rgb = j["rgb"].get<std::string>();
  if (j.contains("scmap") && !j["scmap"].is_null()) {
    if (!j["scmap"].is_string()) Fail("scmap must be a path or null");
    r.scmap = j["scmap"].get<std::string>();
  }
  if (j.contains("pose") && !j["pose"].is_null()) r.pose = PoseFromJson(j["pose"]);
  if (!j.contains("intrinsics")) Fail("record needs intrinsics");
  r.intrinsics = IntrinsicsFromJson(j["intrinsics"]);
  return r;
}

void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& r : records) out << RecordToJson(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path,
                                         bool check_files) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ManifestRecord r = RecordFromJson(json::parse(line));
      if (check_files) {
        if (!std::filesystem::exists(base / r.rgb)) Fail("missing file " + r.rgb);
        if (r.scmap && !std::filesystem::exists(base / *r.scmap)) {
          Fail("missing file " + *r.scmap);
        }
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      Fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParseError) throw;
      Fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Fail(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& j,
                   int indent) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(indent) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace scrforge
