#include "scrforge/dataset.h"

#include <cstdio>
#include <iostream>

#include "scrforge/error.h"
#include "scrforge/parallel.h"
#include "scrforge/random.h"

namespace scrforge {

namespace fs = std::filesystem;

namespace {

std::string FrameId(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", i);
  return prefix + "_" + buf;
}

}  // namespace

RenderDatasetResult RenderDataset(const ColorPointCloud& cloud,
                                  const PoseSamplerConfig& sampler,
                                  const CameraIntrinsics& intr,
                                  const SplatConfig& splat,
                                  const RenderDatasetOptions& options,
                                  const fs::path& out_dir) {
  intr.Validate();
  std::error_code ec;
  fs::create_directories(out_dir / "rgb", ec);
  if (!ec) fs::create_directories(out_dir / "scmap", ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }

  const std::size_t n = options.num_frames;
  RenderDatasetResult result;
  result.manifest = out_dir / "manifest.jsonl";
  result.records.resize(n);
  result.retries.assign(n, 0);
  const double pixels = static_cast<double>(intr.width) * intr.height;

  const std::size_t workers =
      options.threads > 0 ? options.threads : WorkerCount();
  ParallelFor(n, workers, [&](std::size_t i) {
    PoseSamplerConfig frame_sampler = sampler;
    frame_sampler.seed = MixSeed(sampler.seed, i);
    const std::vector<RigidTransform> candidates = SamplePoses(
        frame_sampler, static_cast<std::size_t>(options.max_retries) + 1);
    for (std::size_t attempt = 0; attempt < candidates.size(); ++attempt) {
      SceneCoordFrame frame = Render(cloud, candidates[attempt], intr, splat);
      if (frame.scmap.valid_count() < options.min_valid_fraction * pixels) {
        continue;
      }
      ManifestRecord& rec = result.records[i];
      rec.id = FrameId(options.id_prefix, i);
      rec.rgb = "rgb/" + rec.id + ".png";
      rec.scmap = "scmap/" + rec.id + ".scm";
      rec.pose = frame.pose;
      rec.intrinsics = intr;
      WritePng(out_dir / rec.rgb, frame.rgb);
      WriteScm(out_dir / *rec.scmap, frame.scmap);
      result.retries[i] = static_cast<int>(attempt);
      return;
    }
    throw Error(ErrorCode::kSamplingExhausted,
                "frame " + std::to_string(i) + " stayed below " +
                    std::to_string(options.min_valid_fraction) +
                    " valid pixels after " +
                    std::to_string(options.max_retries) + " retries");
  });

  WriteManifest(result.manifest, result.records);
  for (int r : result.retries) result.total_retries += r;
  if (result.total_retries > 0) {
    std::clog << "render: re-sampled " << result.total_retries
              << " low-coverage view(s) across " << n << " frames\n";
  }
  return result;
}

SceneCoordFrame LoadFrame(const fs::path& manifest_dir,
                          const ManifestRecord& record) {
  if (!record.scmap) {
    throw Error(ErrorCode::kInvalidArgument,
                "record " + record.id + " has no scene coordinate map");
  }
  SceneCoordFrame frame;
  frame.rgb = ReadPng(manifest_dir / record.rgb);
  frame.scmap = ReadScm(manifest_dir / *record.scmap);
  frame.pose = record.pose.value_or(RigidTransform::Identity());
  frame.intrinsics = record.intrinsics;
  return frame;
}

}  // namespace scrforge
