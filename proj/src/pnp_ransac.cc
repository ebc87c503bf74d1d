#include "scrforge/pnp_ransac.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "scrforge/error.h"
#include "scrforge/manifest.h"
#include "scrforge/random.h"

namespace scrforge {

void RansacConfig::Validate() const {
  if (!(inlier_threshold_px > 0.0) || !(confidence > 0.0 && confidence < 1.0) ||
      max_iterations < 1 || min_inliers < 0 || refine_iterations < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "ransac needs threshold > 0, 0 < confidence < 1 and "
                "max_iterations >= 1");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Score {
  int inliers = 0;
  double sum_sq = 0.0;

  double Rms() const { return inliers > 0 ? std::sqrt(sum_sq / inliers) : 0.0; }
  bool BetterThan(const Score& o) const {
    if (inliers != o.inliers) return inliers > o.inliers;
    return sum_sq * o.inliers < o.sum_sq * inliers;
  }
};

Score Classify(std::span<const Correspondence> corrs,
               const CameraIntrinsics& intr, const RigidTransform& pose,
               double threshold, std::vector<std::uint8_t>* mask) {
  Score s;
  if (mask) mask->assign(corrs.size(), 0);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const double e = ReprojectionError(pose, intr, corrs[i]);
    if (e < threshold) {
      ++s.inliers;
      s.sum_sq += e * e;
      if (mask) (*mask)[i] = 1;
    }
  }
  return s;
}

double SumSquared(std::span<const Correspondence> corrs,
                  const CameraIntrinsics& intr, const RigidTransform& pose) {
  double sum = 0.0;
  for (const Correspondence& c : corrs) {
    const double e = ReprojectionError(pose, intr, c);
    sum += e * e;
  }
  return sum;
}

int AdaptiveBound(int best_inliers, std::size_t n, double confidence,
                  int max_iterations) {
  const double w = double(best_inliers) / double(n);
  const double w4 = w * w * w * w;
  if (w4 >= 1.0) return 1;
  if (w4 <= 0.0) return max_iterations;
  const double bound = std::log(1.0 - confidence) / std::log(1.0 - w4);
  if (!std::isfinite(bound) || bound >= max_iterations) return max_iterations;
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

std::vector<Correspondence> Select(std::span<const Correspondence> corrs,
                                   const std::vector<std::uint8_t>& mask) {
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (mask[i]) out.push_back(corrs[i]);
  }
  return out;
}

}  // namespace

RefineResult RefinePose(std::span<const Correspondence> corrs,
                        const CameraIntrinsics& intr,
                        const RigidTransform& init, int max_iterations) {
  RefineResult r;
  r.pose = init;
  double cost = SumSquared(corrs, intr, init);
  const double n = std::max<std::size_t>(1, corrs.size());
  r.initial_rms_px = std::sqrt(cost / n);
  r.final_rms_px = r.initial_rms_px;
  if (corrs.size() < 3 || !std::isfinite(cost)) return r;

  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    const Eigen::Matrix3d rot = r.pose.rotation().Matrix();
    for (const Correspondence& c : corrs) {
      const Eigen::Vector3d p = rot * c.world + r.pose.translation();
      const double iz = 1.0 / p.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << intr.fx * iz, 0.0, -intr.fx * p.x() * iz * iz, 0.0,
          intr.fy * iz, -intr.fy * p.y() * iz * iz;
      // Perturbation in the camera frame: p' = exp(w) p + dt.
      Eigen::Matrix3d skew;
      skew << 0.0, -p.z(), p.y(), p.z(), 0.0, -p.x(), -p.y(), p.x(), 0.0;
      Eigen::Matrix<double, 2, 6> jac;
      jac.leftCols<3>() = -dproj * skew;
      jac.rightCols<3>() = dproj;
      const Eigen::Vector2d res(intr.fx * p.x() * iz + intr.cx - c.pixel.x(),
                                intr.fy * p.y() * iz + intr.cy - c.pixel.y());
      jtj += jac.transpose() * jac;
      jtr += jac.transpose() * res;
    }
    const Eigen::Matrix<double, 6, 1> delta = -jtj.ldlt().solve(jtr);
    if (!delta.allFinite()) break;

    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 20; ++halving, scale *= 0.5) {
      const Eigen::Matrix<double, 6, 1> step = scale * delta;
      const RigidTransform candidate(
          Rotation::FromRotationVector(step.head<3>()) * r.pose.rotation(),
          Rotation::FromRotationVector(step.head<3>()) * r.pose.translation() +
              step.tail<3>());
      const double next = SumSquared(corrs, intr, candidate);
      if (next <= cost) {
        improved = next < cost;
        r.pose = candidate;
        cost = next;
        break;
      }
    }
    r.iterations = it + 1;
    if (!improved) break;
    if (delta.norm() * scale < 1e-12) break;
  }
  r.final_rms_px = std::sqrt(cost / n);
  return r;
}

PoseEstimate PnpRansac(std::span<const Correspondence> corrs,
                       const CameraIntrinsics& intr, const RansacConfig& cfg) {
  cfg.Validate();
  intr.Validate();
  const std::size_t n = corrs.size();
  if (n < 4) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "pnp needs at least 4 correspondences, got " +
                    std::to_string(n));
  }

  std::mt19937_64 rng(cfg.seed);
  PoseEstimate est;
  Score best;
  bool have_best = false;
  int bound = cfg.max_iterations;
  for (int it = 0; it < bound; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = UniformIndex(rng, n);
        fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) ==
                idx.begin() + k;
      } while (!fresh);
    }
    std::vector<RigidTransform> hypotheses;
    try {
      hypotheses = P3PSolve({corrs[idx[0]], corrs[idx[1]], corrs[idx[2]]}, intr);
    } catch (const Error&) {
      continue;
    }
    const RigidTransform* pick = nullptr;
    double pick_err = kInf;
    for (const RigidTransform& h : hypotheses) {
      const double e = ReprojectionError(h, intr, corrs[idx[3]]);
      if (e < pick_err) {
        pick_err = e;
        pick = &h;
      }
    }
    if (!pick || !(pick_err < cfg.inlier_threshold_px)) continue;
    const Score s = Classify(corrs, intr, *pick, cfg.inlier_threshold_px, nullptr);
    if (!have_best || s.BetterThan(best)) {
      best = s;
      have_best = true;
      est.pose = *pick;
      bound = AdaptiveBound(best.inliers, n, cfg.confidence, cfg.max_iterations);
    }
  }
  if (!have_best) return est;

  // Refine on the inliers, then re-classify with the refined pose; a round
  // that loses inliers is discarded.
  Score score =
      Classify(corrs, intr, est.pose, cfg.inlier_threshold_px, &est.inlier_mask);
  for (int round = 0; round < 3 && cfg.refine_iterations > 0; ++round) {
    const std::vector<Correspondence> inliers = Select(corrs, est.inlier_mask);
    const RefineResult refined =
        RefinePose(inliers, intr, est.pose, cfg.refine_iterations);
    std::vector<std::uint8_t> mask;
    const Score s =
        Classify(corrs, intr, refined.pose, cfg.inlier_threshold_px, &mask);
    if (s.inliers < score.inliers) break;
    const bool same_set = mask == est.inlier_mask;
    est.pose = refined.pose;
    est.inlier_mask = std::move(mask);
    score = s;
    if (same_set && refined.iterations <= 1) break;
  }
  est.inlier_count = score.inliers;
  est.rms_px = score.Rms();
  est.valid = score.inliers >= cfg.min_inliers;
  return est;
}

nlohmann::json PoseEstimateToJson(const PoseEstimate& est) {
  nlohmann::json j = PoseToJson(est.pose);
  j["inliers"] = est.inlier_count;
  j["rms"] = est.rms_px;
  j["valid"] = est.valid;
  return j;
}

PoseEstimate PoseEstimateFromJson(const nlohmann::json& j) {
  PoseEstimate est;
  est.pose = PoseFromJson(j);
  if (!j.contains("inliers") || !j["inliers"].is_number_integer() ||
      !j.contains("rms") || !j["rms"].is_number() || !j.contains("valid") ||
      !j["valid"].is_boolean()) {
    throw Error(ErrorCode::kParseError,
                "pose estimate needs integer inliers, numeric rms and a "
                "boolean valid");
  }
  est.inlier_count = j["inliers"].get<int>();
  est.rms_px = j["rms"].get<double>();
  est.valid = j["valid"].get<bool>();
  return est;
}

}  // namespace scrforge
