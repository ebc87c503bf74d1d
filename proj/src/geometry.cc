#include "scrforge/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "scrforge/error.h"

namespace scrforge {

Rotation::Rotation(double w, double x, double y, double z)
    : Rotation(Eigen::Quaterniond(w, x, y, z)) {}

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(q) {
  const double n = q_.norm();
  if (!std::isfinite(n) || n < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument,
                "quaternion must be finite and non-zero");
  }
  // Already-unit input is kept bit-exact so serialized poses round-trip.
  if (std::abs(n - 1.0) > 1e-15) q_.coeffs() /= n;
  Canonicalize();
}

void Rotation::Canonicalize() {
  if (q_.w() < 0.0) q_.coeffs() = -q_.coeffs();
}

Rotation Rotation::FromAxisAngle(const Eigen::Vector3d& axis, double radians) {
  const double n = axis.norm();
  if (n < 1e-15) return Identity();
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(radians, axis / n)));
}

Rotation Rotation::FromRotationVector(const Eigen::Vector3d& rotvec) {
  const double theta = rotvec.norm();
  if (theta < 1e-10) {
    // Second-order expansion of the exponential map.
    return Rotation(1.0 - theta * theta / 8.0, 0.5 * rotvec.x(),
                    0.5 * rotvec.y(), 0.5 * rotvec.z());
  }
  return FromAxisAngle(rotvec / theta, theta);
}

Rotation Rotation::FromMatrix(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return Rotation(Eigen::Quaterniond(Eigen::Matrix3d(u * v.transpose())));
}

Rotation Rotation::AboutZDeg(double degrees) {
  return FromAxisAngle(Eigen::Vector3d::UnitZ(),
                       degrees * std::numbers::pi / 180.0);
}

Eigen::Vector3d Rotation::RotationVector() const {
  const Eigen::Vector3d v = q_.vec();
  const double s = v.norm();
  if (s < 1e-10) return 2.0 * v;
  // w >= 0 keeps the angle in [0, pi].
  const double theta = 2.0 * std::atan2(s, q_.w());
  return v * (theta / s);
}

Rotation Rotation::Inverse() const { return Rotation(q_.conjugate()); }

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(q_ * other.q_);
}

RigidTransform RigidTransform::FromCenter(const Rotation& rotation,
                                          const Eigen::Vector3d& center) {
  return RigidTransform(rotation, -(rotation * center));
}

Eigen::Vector3d RigidTransform::Center() const {
  return -(rotation_.Inverse() * translation_);
}

RigidTransform RigidTransform::Inverse() const {
  const Rotation inv = rotation_.Inverse();
  return RigidTransform(inv, -(inv * translation_));
}

Eigen::Matrix4d RigidTransform::Matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.Matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform Compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return Compose(a, b);
}

void CameraIntrinsics::Validate() const {
  const bool ok = std::isfinite(fx) && std::isfinite(fy) && fx > 0.0 &&
                  fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
                  cx < width && cy >= 0.0 && cy < height;
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "intrinsics need fx, fy > 0 and a principal point inside the "
                "image");
  }
}

Projection Project(const CameraIntrinsics& intr, const Eigen::Vector3d& p_cam) {
  if (!(p_cam.z() > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "point has z <= 0");
  }
  return {intr.fx * p_cam.x() / p_cam.z() + intr.cx,
          intr.fy * p_cam.y() / p_cam.z() + intr.cy, p_cam.z()};
}

Eigen::Vector3d Unproject(const CameraIntrinsics& intr, double u, double v,
                          double depth) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  }
  return {(u - intr.cx) / intr.fx * depth, (v - intr.cy) / intr.fy * depth,
          depth};
}

double RotationAngleDeg(const Rotation& a, const Rotation& b) {
  const double trace = (a.Matrix().transpose() * b.Matrix()).trace();
  const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace scrforge
