#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "scrforge/manifest.h"
#include "scrforge/renderer.h"

namespace scrforge {

struct RenderDatasetOptions {
  std::size_t num_frames = 0;
  // Views with fewer valid pixels are re-sampled.
  double min_valid_fraction = 0.05;
  int max_retries = 10;
  // 0 selects WorkerCount().
  std::size_t threads = 0;
  std::string id_prefix = "frame";
};

struct RenderDatasetResult {
  std::filesystem::path manifest;
  std::vector<ManifestRecord> records;
  std::vector<int> retries;  // per frame
  int total_retries = 0;
};

// Renders options.num_frames views into out_dir: rgb/<id>.png,
// scmap/<id>.scm (SCM1, mask included) and manifest.jsonl. Frame i draws its
// candidate poses from a sampler seeded with MixSeed(sampler.seed, i), so the
// output does not depend on the worker count.
// Throws IoError or SamplingExhausted.
RenderDatasetResult RenderDataset(const ColorPointCloud& cloud,
                                  const PoseSamplerConfig& sampler,
                                  const CameraIntrinsics& intr,
                                  const SplatConfig& splat,
                                  const RenderDatasetOptions& options,
                                  const std::filesystem::path& out_dir);

// Loads the frame a manifest record points to; pose and intrinsics come from
// the record. Throws IoError/ParseError, InvalidArgument without a scmap.
SceneCoordFrame LoadFrame(const std::filesystem::path& manifest_dir,
                          const ManifestRecord& record);

}  // namespace scrforge
