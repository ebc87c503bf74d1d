#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "scrforge/geometry.h"
#include "scrforge/p3p.h"

namespace scrforge {

struct RansacConfig {
  double inlier_threshold_px = 10.0;
  double confidence = 0.99;
  int max_iterations = 1000;
  int min_inliers = 12;
  int refine_iterations = 20;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void Validate() const;
};

struct PoseEstimate {
  RigidTransform pose;
  int inlier_count = 0;
  std::vector<std::uint8_t> inlier_mask;
  double rms_px = 0.0;  // over inliers
  bool valid = false;
};

// Hypothesizes from random 4-samples (P3P on three, the fourth picks among
// the solutions), scores by inlier count with ties to the lower RMS, stops
// after log(1 - confidence) / log(1 - w^4) iterations for the best inlier
// ratio w so far, then refines on the inliers with Gauss-Newton, twice
// re-classifying and re-refining. Deterministic in (corrs, cfg).
// Throws TooFewCorrespondences for fewer than 4 correspondences.
PoseEstimate PnpRansac(std::span<const Correspondence> corrs,
                       const CameraIntrinsics& intr,
                       const RansacConfig& cfg = {});

// Gauss-Newton on the summed squared reprojection error of `corrs` over a
// rotation vector and translation update. Steps that raise the cost are
// halved until they do not, so the RMS never increases.
struct RefineResult {
  RigidTransform pose;
  double initial_rms_px = 0.0;
  double final_rms_px = 0.0;
  int iterations = 0;
};
RefineResult RefinePose(std::span<const Correspondence> corrs,
                        const CameraIntrinsics& intr,
                        const RigidTransform& init, int max_iterations = 20);

// {"q": [w, x, y, z], "t": [...], "inliers": n, "rms": px, "valid": bool}
nlohmann::json PoseEstimateToJson(const PoseEstimate& est);
// The inlier mask is not serialized. Throws ParseError.
PoseEstimate PoseEstimateFromJson(const nlohmann::json& j);

}  // namespace scrforge
