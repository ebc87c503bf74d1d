#pragma once

#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "scrforge/geometry.h"
#include "scrforge/p3p.h"

namespace scrforge::testing {

inline double DegToRad(double d) { return d * std::numbers::pi / 180.0; }

// Uniformly distributed rotation (normalized Gaussian quaternion).
inline Rotation RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Rotation(n(rng), n(rng), n(rng), n(rng));
}

inline Eigen::Vector3d RandomVector(std::mt19937_64& rng, double lo,
                                    double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(rng), d(rng), d(rng)};
}

inline Eigen::Vector3d RandomUnitVector(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline RigidTransform RandomTransform(std::mt19937_64& rng,
                                      double max_translation = 5.0) {
  return RigidTransform(RandomRotation(rng),
                        RandomVector(rng, -max_translation, max_translation));
}

inline CameraIntrinsics DefaultIntrinsics() {
  CameraIntrinsics k;
  k.fx = 500.0;
  k.fy = 500.0;
  k.cx = 320.0;
  k.cy = 180.0;
  k.width = 640;
  k.height = 360;
  return k;
}

// World point that projects inside the image at a depth in [near, far].
inline Eigen::Vector3d RandomVisiblePoint(std::mt19937_64& rng,
                                          const RigidTransform& pose,
                                          const CameraIntrinsics& k,
                                          double near = 1.0, double far = 8.0) {
  std::uniform_real_distribution<double> u(0.0, k.width);
  std::uniform_real_distribution<double> v(0.0, k.height);
  std::uniform_real_distribution<double> d(near, far);
  const double px = u(rng), py = v(rng);
  return pose.Inverse().Apply(Unproject(k, px, py, d(rng)));
}

}  // namespace scrforge::testing

namespace scrforge::testing {

// Synthetic PnP problem: `n` points seen by `gt`; the first
// round(outlier_fraction * n) get an unrelated world point, the rest carry
// Gaussian pixel noise of `sigma_px`.
struct PnpProblem {
  RigidTransform gt;
  std::vector<Correspondence> corrs;
  std::vector<std::uint8_t> is_inlier;
};

inline PnpProblem MakePnpProblem(std::mt19937_64& rng,
                                 const CameraIntrinsics& k, int n,
                                 double outlier_fraction, double sigma_px) {
  PnpProblem p;
  p.gt = RandomTransform(rng);
  std::normal_distribution<double> noise(0.0, sigma_px > 0 ? sigma_px : 1.0);
  const int outliers = static_cast<int>(std::lround(outlier_fraction * n));
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d world = RandomVisiblePoint(rng, p.gt, k);
    const Projection proj = Project(k, p.gt.Apply(world));
    Eigen::Vector2d px(proj.u, proj.v);
    if (i < outliers) {
      p.corrs.push_back({px, RandomVisiblePoint(rng, p.gt, k)});
      p.is_inlier.push_back(0);
    } else {
      if (sigma_px > 0) px += Eigen::Vector2d(noise(rng), noise(rng));
      p.corrs.push_back({px, world});
      p.is_inlier.push_back(1);
    }
  }
  return p;
}

}  // namespace scrforge::testing
