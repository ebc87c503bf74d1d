#include "scrforge/registration.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "scrforge/error.h"
#include "scrforge/parallel.h"
#include "scrforge/random.h"

namespace scrforge {

RigidTransform UmeyamaRigid(std::span<const Eigen::Vector3d> src,
                            std::span<const Eigen::Vector3d> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "umeyama: " + std::to_string(src.size()) + " source vs " +
                    std::to_string(dst.size()) + " target points");
  }
  const std::size_t n = src.size();
  if (n < 3) {
    throw Error(ErrorCode::kTooFewPoints, "umeyama needs at least 3 points");
  }
  Eigen::Vector3d mu_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_dst = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= double(n);
  mu_dst /= double(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d a = src[i] - mu_src;
    cov += (dst[i] - mu_dst) * a.transpose();
    scatter += a * a.transpose();
  }

  // Rank of the centered source set from its scatter spectrum.
  Eigen::JacobiSVD<Eigen::Matrix3d> spread(scatter);
  const Eigen::Vector3d s = spread.singularValues();
  if (!(s(1) > 1e-20 && s(1) > 1e-12 * s(0))) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "umeyama: source points are collinear or coincident");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU |
                                                 Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if (u.determinant() * v.determinant() < 0.0) d(2, 2) = -1.0;
  const Eigen::Matrix3d r = u * d * v.transpose();
  const Rotation rot{Eigen::Quaterniond(r)};
  return RigidTransform(rot, mu_dst - rot * mu_src);
}

void IcpConfig::Validate() const {
  if (max_iterations < 1 || !(convergence_threshold > 0.0) ||
      !(max_correspondence_distance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "icp needs max_iterations >= 1 and positive thresholds");
  }
}

IcpResult Icp(const ColorPointCloud& src, const ColorPointCloud& dst,
              const RigidTransform& init, const IcpConfig& cfg) {
  if (dst.empty()) throw Error(ErrorCode::kEmptyCloud, "icp: empty target");
  const SpatialIndex index(dst);
  return Icp(src, dst, index, init, cfg);
}

IcpResult Icp(const ColorPointCloud& src, const ColorPointCloud& dst,
              const SpatialIndex& dst_index, const RigidTransform& init,
              const IcpConfig& cfg) {
  cfg.Validate();
  if (src.empty() || dst.empty() || dst_index.empty()) {
    throw Error(ErrorCode::kEmptyCloud, "icp needs two non-empty clouds");
  }

  std::vector<std::size_t> picks(src.size());
  std::iota(picks.begin(), picks.end(), 0);
  if (cfg.max_source_points > 0 && cfg.max_source_points < src.size()) {
    // Partial Fisher-Yates, then restore cloud order.
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.max_source_points; ++i) {
      std::swap(picks[i], picks[i + UniformIndex(rng, picks.size() - i)]);
    }
    picks.resize(cfg.max_source_points);
    std::sort(picks.begin(), picks.end());
  }
  std::vector<Eigen::Vector3d> points(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    points[i] = src.positions[picks[i]].cast<double>();
  }

  const double max_sq =
      cfg.max_correspondence_distance * cfg.max_correspondence_distance;
  const std::size_t workers = WorkerCount();
  std::vector<NeighborResult> nn(points.size());
  std::vector<Eigen::Vector3d> matched_src, matched_dst;

  IcpResult result;
  result.transform = init;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const RigidTransform& current = result.transform;
    ParallelFor(points.size(), workers, [&](std::size_t i) {
      nn[i] = dst_index.Nearest(current.Apply(points[i]));
    });
    matched_src.clear();
    matched_dst.clear();
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (nn[i].squared_distance > max_sq) continue;
      matched_src.push_back(points[i]);
      matched_dst.push_back(dst.positions[nn[i].index].cast<double>());
      sum_sq += nn[i].squared_distance;
    }
    if (matched_src.empty()) {
      throw Error(ErrorCode::kNoCorrespondences,
                  "icp: no pair within " +
                      std::to_string(cfg.max_correspondence_distance) +
                      " m at iteration " + std::to_string(it + 1));
    }
    const double rms_before = std::sqrt(sum_sq / double(matched_src.size()));
    result.rms_history.push_back(rms_before);

    RigidTransform next = current;
    if (matched_src.size() >= 3) {
      try {
        next = UmeyamaRigid(matched_src, matched_dst);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateConfiguration) throw;
      }
    }
    double after_sq = 0.0;
    for (std::size_t i = 0; i < matched_src.size(); ++i) {
      after_sq += (next.Apply(matched_src[i]) - matched_dst[i]).squaredNorm();
    }
    const double rms_after = std::sqrt(after_sq / double(matched_src.size()));
    result.iterations = it + 1;
    // The closed-form step is optimal for fixed pairs, so a larger RMS can
    // only come from round-off; keep the old pose then.
    if (rms_after <= rms_before) {
      result.transform = next;
      result.rms = rms_after;
    } else {
      result.rms = rms_before;
    }
    if (std::abs(rms_before - result.rms) < cfg.convergence_threshold) break;
  }
  result.rms_history.push_back(result.rms);
  return result;
}

}  // namespace scrforge
