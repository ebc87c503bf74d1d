#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scrforge/config.h"
#include "scrforge/eval.h"
#include "scrforge/manifest.h"
#include "scrforge/pnp_ransac.h"
#include "scrforge/scm_io.h"

namespace scrforge {

// Samples correspondences from a map (full resolution or a coarse grid, see
// CorrespondencesForImage) and runs PnP-RANSAC. Maps with fewer than four
// usable cells give an invalid estimate instead of an error.
PoseEstimate SolveMap(const SceneCoordMap& map, const CameraIntrinsics& intr,
                      const RansacConfig& cfg, int stride);

// Estimate JSONL: one PoseEstimateToJson object per line plus "id".
void WriteEstimates(const std::filesystem::path& path,
                    const std::vector<std::string>& ids,
                    const std::vector<PoseEstimate>& estimates);
std::vector<std::pair<std::string, PoseEstimate>> ReadEstimates(
    const std::filesystem::path& path);

// Pairs every posed ground-truth record with the estimate of the same id;
// records without an estimate count as invalid. Throws EmptyList when no
// record has a pose.
std::vector<PoseError> MatchErrors(
    const std::vector<ManifestRecord>& gt,
    const std::vector<std::pair<std::string, PoseEstimate>>& estimates);

// Overwrites about `fraction` of the valid cells with points drawn uniformly
// from `box`.
void CorruptMap(SceneCoordMap& map, double fraction, const BoundingBox& box,
                std::uint64_t seed);

struct ToyPipelineResult {
  EvalReport oracle;     // rendered scene coordinates
  EvalReport corrupted;  // with config.toy.corrupt_fraction replaced by noise
  std::filesystem::path report_json;
  std::filesystem::path report_table;
};

// Builds the procedural room, renders train and test sets under out_dir,
// solves every test frame from its oracle map and from a corrupted copy,
// and writes estimates, report.json and report.md.
// Throws IoError, EmptyList (no test frames) and rendering errors.
ToyPipelineResult RunToyPipeline(const PipelineConfig& config,
                                 const std::filesystem::path& out_dir);

}  // namespace scrforge
