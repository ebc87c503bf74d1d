#include "scrforge/renderer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scrforge/error.h"
#include "scrforge/random.h"

namespace scrforge {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

int SplatConfig::RadiusPx(double fx, double depth) const {
  const double r = std::round(point_size * fx / depth);
  if (!(r >= 1.0)) return 1;
  // Anything this large already covers the image.
  return static_cast<int>(std::min(r, 1e6));
}

SceneCoordFrame Render(const ColorPointCloud& cloud, const RigidTransform& pose,
                       const CameraIntrinsics& intr, const SplatConfig& cfg) {
  intr.Validate();
  const int w = intr.width;
  const int h = intr.height;
  SceneCoordFrame frame;
  frame.rgb = RgbImage(w, h);
  frame.scmap = SceneCoordMap(w, h);
  frame.pose = pose;
  frame.intrinsics = intr;

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<double> zbuf(std::size_t(w) * h,
                           std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> winner(std::size_t(w) * h, kNone);

  const Eigen::Matrix3d r = pose.rotation().Matrix();
  const Eigen::Vector3d& t = pose.translation();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d pc = r * cloud.positions[i].cast<double>() + t;
    const double z = pc.z();
    if (!(z > 0.0)) continue;
    const double u = intr.fx * pc.x() / z + intr.cx;
    const double v = intr.fy * pc.y() / z + intr.cy;
    const double radius = cfg.RadiusPx(intr.fx, z);
    // Pixel x covers [x, x + 1); its center is x + 0.5.
    const double x_lo = std::max(0.0, std::floor(u - radius - 0.5));
    const double x_hi = std::min(w - 1.0, std::ceil(u + radius - 0.5));
    const double y_lo = std::max(0.0, std::floor(v - radius - 0.5));
    const double y_hi = std::min(h - 1.0, std::ceil(v + radius - 0.5));
    if (x_lo > x_hi || y_lo > y_hi) continue;
    const double r2 = radius * radius;
    for (int py = static_cast<int>(y_lo); py <= static_cast<int>(y_hi); ++py) {
      const double dy = py + 0.5 - v;
      for (int px = static_cast<int>(x_lo); px <= static_cast<int>(x_hi);
           ++px) {
        const double dx = px + 0.5 - u;
        if (dx * dx + dy * dy > r2) continue;
        const std::size_t k = std::size_t(py) * w + px;
        if (z < zbuf[k]) {
          zbuf[k] = z;
          winner[k] = static_cast<std::uint32_t>(i);
        }
      }
    }
  }

  const RigidTransform cam_to_world = pose.Inverse();
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const std::size_t k = std::size_t(py) * w + px;
      if (winner[k] == kNone) continue;
      const Eigen::Vector3d ray_point =
          Unproject(intr, px + 0.5, py + 0.5, zbuf[k]);
      frame.scmap.set(px, py, cam_to_world.Apply(ray_point).cast<float>());
      frame.rgb.set(px, py, cloud.colors[winner[k]]);
    }
  }
  return frame;
}

ReprojectionCheck CheckReprojection(const SceneCoordFrame& frame,
                                    double tolerance_px) {
  ReprojectionCheck check;
  const SceneCoordMap& map = frame.scmap;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (!map.valid(x, y)) continue;
      ++check.valid_pixels;
      const Eigen::Vector3d pc =
          frame.pose.Apply(map.at(x, y).cast<double>());
      if (!(pc.z() > 0.0)) {
        check.max_error_px = std::numeric_limits<double>::infinity();
        continue;
      }
      const Projection p = Project(frame.intrinsics, pc);
      const double err = std::hypot(p.u - (x + 0.5), p.v - (y + 0.5));
      check.max_error_px = std::max(check.max_error_px, err);
      if (err <= tolerance_px) ++check.consistent_pixels;
    }
  }
  return check;
}

void PoseSamplerConfig::Validate() const {
  const double z_lo = std::max(min_height, aabb.min.z());
  const double z_hi = std::min(max_height, aabb.max.z());
  const bool ok = aabb.min.allFinite() && aabb.max.allFinite() &&
                  (aabb.min.array() <= aabb.max.array()).all() &&
                  min_height <= max_height && z_lo <= z_hi &&
                  yaw_min_deg <= yaw_max_deg && max_pitch_deg >= 0.0 &&
                  max_roll_deg >= 0.0;
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "pose sampler needs a non-empty box overlapping the height "
                "range");
  }
}

BoundingBox DefaultSamplerAabb(const ColorPointCloud& cloud, double margin) {
  BoundingBox box = ComputeBoundingBox(cloud);
  box.min.array() += margin;
  box.max.array() -= margin;
  // Collapse to the center on axes thinner than twice the margin.
  for (int k = 0; k < 3; ++k) {
    if (box.min[k] > box.max[k]) {
      const double c = 0.5 * (box.min[k] + box.max[k]);
      box.min[k] = box.max[k] = c;
    }
  }
  return box;
}

std::vector<RigidTransform> SamplePoses(const PoseSamplerConfig& cfg,
                                        std::size_t n) {
  std::vector<RigidTransform> poses;
  if (n == 0) return poses;
  cfg.Validate();
  poses.reserve(n);
  std::mt19937_64 rng(cfg.seed);
  const double z_lo = std::max(cfg.min_height, cfg.aabb.min.z());
  const double z_hi = std::min(cfg.max_height, cfg.aabb.max.z());

  // Camera axes in world coordinates at zero yaw/pitch/roll:
  // x (right) = -y_w, y (down) = -z_w, z (forward) = +x_w.
  Eigen::Matrix3d base;
  base.col(0) = -Eigen::Vector3d::UnitY();
  base.col(1) = -Eigen::Vector3d::UnitZ();
  base.col(2) = Eigen::Vector3d::UnitX();

  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d center(
        UniformRange(rng, cfg.aabb.min.x(), cfg.aabb.max.x()),
        UniformRange(rng, cfg.aabb.min.y(), cfg.aabb.max.y()),
        UniformRange(rng, z_lo, z_hi));
    const double yaw = UniformRange(rng, cfg.yaw_min_deg, cfg.yaw_max_deg);
    const double pitch =
        UniformRange(rng, -cfg.max_pitch_deg, cfg.max_pitch_deg);
    const double roll = UniformRange(rng, -cfg.max_roll_deg, cfg.max_roll_deg);

    const Eigen::Matrix3d cam_to_world =
        Eigen::AngleAxisd(yaw * kDegToRad, Eigen::Vector3d::UnitZ())
            .toRotationMatrix() *
        base *
        Eigen::AngleAxisd(pitch * kDegToRad, Eigen::Vector3d::UnitX())
            .toRotationMatrix() *
        Eigen::AngleAxisd(roll * kDegToRad, Eigen::Vector3d::UnitZ())
            .toRotationMatrix();
    poses.push_back(RigidTransform::FromCenter(
        Rotation(Eigen::Quaterniond(Eigen::Matrix3d(cam_to_world.transpose()))),
        center));
  }
  return poses;
}

double CameraYawDeg(const RigidTransform& pose) {
  // Optical axis in world coordinates is the third row of R.
  const Eigen::Vector3d forward =
      pose.rotation().Matrix().row(2).transpose();
  double yaw = std::atan2(forward.y(), forward.x()) / kDegToRad;
  if (yaw < 0.0) yaw += 360.0;
  if (yaw >= 360.0) yaw -= 360.0;
  return yaw;
}

}  // namespace scrforge
