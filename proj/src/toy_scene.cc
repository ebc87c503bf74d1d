#include "scrforge/toy_scene.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "scrforge/error.h"
#include "scrforge/random.h"

namespace scrforge {
namespace {

struct Face {
  Eigen::Vector3d origin;
  Eigen::Vector3d axis_u;  // spans the face together with axis_v
  Eigen::Vector3d axis_v;
  Eigen::Vector3d base_color;
  Eigen::Vector3d gradient_u;
  Eigen::Vector3d gradient_v;
  double area() const { return axis_u.norm() * axis_v.norm(); }
};

std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

ColorPointCloud MakeToyRoom(const ToyRoomOptions& o) {
  if (!(o.width > 0 && o.length > 0 && o.height > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "room dimensions must be positive");
  }
  const double W = o.width, L = o.length, H = o.height;
  const std::array<Face, 6> faces = {{
      // floor, ceiling
      {{0, 0, 0}, {W, 0, 0}, {0, L, 0}, {90, 70, 50}, {40, 0, 20}, {0, 60, 10}},
      {{0, 0, H}, {W, 0, 0}, {0, L, 0}, {220, 220, 200}, {-30, 0, 0}, {0, -40, 20}},
      // walls at y = 0 and y = L
      {{0, 0, 0}, {W, 0, 0}, {0, 0, H}, {180, 60, 60}, {60, 40, 0}, {0, 0, 60}},
      {{0, L, 0}, {W, 0, 0}, {0, 0, H}, {60, 160, 80}, {0, 60, 40}, {50, 0, 0}},
      // walls at x = 0 and x = W
      {{0, 0, 0}, {0, L, 0}, {0, 0, H}, {60, 80, 180}, {80, 0, -40}, {0, 50, 0}},
      {{W, 0, 0}, {0, L, 0}, {0, 0, H}, {200, 170, 60}, {-60, -60, 80}, {0, 0, -50}},
  }};
  double total_area = 0.0;
  for (const Face& f : faces) total_area += f.area();

  std::mt19937_64 rng(o.seed);
  ColorPointCloud cloud;
  cloud.reserve(o.num_points);
  std::size_t assigned = 0;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const Face& f = faces[fi];
    const std::size_t count =
        fi + 1 == faces.size()
            ? o.num_points - assigned
            : static_cast<std::size_t>(std::llround(
                  static_cast<double>(o.num_points) * f.area() / total_area));
    assigned += count;
    const double lu = f.axis_u.norm();
    const double lv = f.axis_v.norm();
    for (std::size_t i = 0; i < count; ++i) {
      const double a = Uniform01(rng);
      const double b = Uniform01(rng);
      const Eigen::Vector3d p = f.origin + a * f.axis_u + b * f.axis_v;
      // Stripes with a period of about half a meter in each direction.
      const double texture =
          25.0 * std::sin(2.0 * std::numbers::pi * a * lu / 0.5) *
          std::cos(2.0 * std::numbers::pi * b * lv / 0.7);
      const Eigen::Vector3d c = f.base_color + a * f.gradient_u +
                                b * f.gradient_v +
                                Eigen::Vector3d::Constant(texture);
      cloud.push_back(p.cast<float>(), Rgb8{ToByte(c.x()), ToByte(c.y()),
                                            ToByte(c.z())});
    }
  }
  return cloud;
}

CameraIntrinsics ToyIntrinsics() {
  CameraIntrinsics k;
  k.fx = 500.0;
  k.fy = 500.0;
  k.cx = 320.0;
  k.cy = 180.0;
  k.width = 640;
  k.height = 360;
  return k;
}

}  // namespace scrforge
