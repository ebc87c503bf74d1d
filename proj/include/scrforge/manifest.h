#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scrforge/geometry.h"

namespace scrforge {

// One frame of a dataset. Paths are relative to the manifest's directory.
// A missing pose marks an unlabeled photo.
struct ManifestRecord {
  std::string id;
  std::string rgb;
  std::optional<std::string> scmap;
  std::optional<RigidTransform> pose;
  CameraIntrinsics intrinsics;
};

nlohmann::json PoseToJson(const RigidTransform& pose);
// Expects {"q": [w, x, y, z], "t": [tx, ty, tz]}; the quaternion must have
// unit norm within 1e-6. Throws ParseError.
RigidTransform PoseFromJson(const nlohmann::json& j);

nlohmann::json IntrinsicsToJson(const CameraIntrinsics& intr);
// Throws ParseError on missing fields or invalid values.
CameraIntrinsics IntrinsicsFromJson(const nlohmann::json& j);
CameraIntrinsics ReadIntrinsicsFile(const std::filesystem::path& path);

nlohmann::json RecordToJson(const ManifestRecord& record);
ManifestRecord RecordFromJson(const nlohmann::json& j);

// One compact JSON object per line. Throws IoError.
void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestRecord>& records);

// Throws IoError, or ParseError (with the line number) on malformed records
// and, when `check_files` is set, on references to missing files.
std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path,
                                         bool check_files = true);

// Reads a whole JSON document. Throws IoError or ParseError.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Writes `j` followed by a newline. Throws IoError.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j,
                   int indent = 2);

}  // namespace scrforge
