#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "scrforge/eval.h"
#include "scrforge/pnp_ransac.h"
#include "scrforge/registration.h"
#include "scrforge/renderer.h"
#include "scrforge/toy_scene.h"

namespace scrforge {

// Every stage's settings. All fields have defaults, so an empty file is a
// valid configuration. Per-stage seeds are derived from `seed`.
struct PipelineConfig {
  std::uint64_t seed = 0;

  struct Render {
    SplatConfig splat;
    // Sampler box = cloud bounding box shrunk by this much per side.
    double aabb_margin = 0.5;
    double min_height = 1.0;
    double max_height = 1.6;
    double yaw_min_deg = 0.0;
    double yaw_max_deg = 360.0;
    double max_pitch_deg = 15.0;
    double max_roll_deg = 5.0;
    double min_valid_fraction = 0.05;
    int max_retries = 10;
  } render;

  struct Histmatch {
    // Pool the CDFs over all images rather than matching image by image.
    bool pooled = true;
  } histmatch;

  RansacConfig ransac;
  // Pixel stride for sampling full-resolution maps.
  int stride = 8;

  IcpConfig icp;

  struct Toy {
    ToyRoomOptions room;
    std::size_t train_frames = 50;
    std::size_t test_frames = 200;
    // Share of test map pixels overwritten with uniform noise in the
    // corrupted run.
    double corrupt_fraction = 0.4;
  } toy;

  PercentilePolicy percentile_policy = PercentilePolicy::kExclude;

  // Sampler for the given cloud, seeded from `seed`.
  PoseSamplerConfig SamplerFor(const ColorPointCloud& cloud) const;
  // Copies of the stage configs carrying derived seeds.
  RansacConfig Ransac() const;
  IcpConfig Icp() const;

  // Throws ConfigError.
  void Validate() const;
};

// Parses TOML. Unknown tables or keys and wrongly typed values are
// ConfigErrors.
PipelineConfig ParsePipelineConfig(const std::string& toml_text);
// Throws IoError or ConfigError.
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

}  // namespace scrforge
