#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scrforge {

// Unit quaternion rotation. Stored canonicalized with w >= 0 so that equal
// rotations serialize identically.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}
  // Normalizes the input; throws InvalidArgument on a zero or non-finite
  // quaternion.
  Rotation(double w, double x, double y, double z);
  explicit Rotation(const Eigen::Quaterniond& q);

  static Rotation Identity() { return Rotation(); }
  static Rotation FromAxisAngle(const Eigen::Vector3d& axis, double radians);
  // Rotation vector (axis * angle, radians). Exponential map of so(3).
  static Rotation FromRotationVector(const Eigen::Vector3d& rotvec);
  // Projects onto SO(3) first, so slightly non-orthonormal input is accepted.
  static Rotation FromMatrix(const Eigen::Matrix3d& m);
  static Rotation AboutZDeg(double degrees);

  const Eigen::Quaterniond& quaternion() const { return q_; }
  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }

  Eigen::Matrix3d Matrix() const { return q_.toRotationMatrix(); }
  Eigen::Vector3d RotationVector() const;
  Rotation Inverse() const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return q_ * p; }
  Rotation operator*(const Rotation& other) const;

 private:
  void Canonicalize();

  Eigen::Quaterniond q_;
};

// World-to-camera rigid transform: p_cam = R * p_world + t.
class RigidTransform {
 public:
  RigidTransform() : translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Rotation& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform Identity() { return RigidTransform(); }
  // Builds the world-to-camera transform of a camera with orientation
  // R (world-to-camera) located at `center` in world coordinates.
  static RigidTransform FromCenter(const Rotation& rotation,
                                   const Eigen::Vector3d& center);

  const Rotation& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return Apply(p); }

  // Camera center C = -R^T t.
  Eigen::Vector3d Center() const;
  RigidTransform Inverse() const;
  Eigen::Matrix4d Matrix() const;

 private:
  Rotation rotation_;
  Eigen::Vector3d translation_;
};

// Maps p to a(b(p)).
RigidTransform Compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);

// Pinhole intrinsics, zero skew, no distortion.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InvalidArgument unless fx, fy > 0, 0 <= cx < width and
  // 0 <= cy < height.
  void Validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Throws BehindCamera for z <= 0. The result may lie outside the image.
Projection Project(const CameraIntrinsics& intr, const Eigen::Vector3d& p_cam);
// Throws NonPositiveDepth for depth <= 0.
Eigen::Vector3d Unproject(const CameraIntrinsics& intr, double u, double v,
                          double depth);

// Geodesic angle between two rotations in degrees, in [0, 180].
double RotationAngleDeg(const Rotation& a, const Rotation& b);

}  // namespace scrforge
