#include "scrforge/p3p.h"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "scrforge/error.h"
#include "scrforge/polynomial.h"
#include "scrforge/registration.h"

namespace scrforge {

double ReprojectionError(const RigidTransform& pose,
                         const CameraIntrinsics& intr,
                         const Correspondence& c) {
  const Eigen::Vector3d p = pose.Apply(c.world);
  if (!(p.z() > 0.0)) return std::numeric_limits<double>::infinity();
  const double du = intr.fx * p.x() / p.z() + intr.cx - c.pixel.x();
  const double dv = intr.fy * p.y() / p.z() + intr.cy - c.pixel.y();
  return std::sqrt(du * du + dv * dv);
}

namespace {

constexpr double kMaxResidualPx = 1e-6;

Eigen::Vector3d Bearing(const CameraIntrinsics& intr,
                        const Eigen::Vector2d& px) {
  return Eigen::Vector3d((px.x() - intr.cx) / intr.fx,
                         (px.y() - intr.cy) / intr.fy, 1.0)
      .normalized();
}

// Newton on the three law-of-cosines equations in the ray lengths, to clean
// up the quartic root before the alignment.
void RefineLengths(const std::array<Eigen::Vector3d, 3>& f,
                   const std::array<double, 3>& d2, Eigen::Vector3d& s) {
  // Pairs (1,2) -> d2[0], (0,2) -> d2[1], (0,1) -> d2[2].
  constexpr int kPairs[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  const double cosines[3] = {f[1].dot(f[2]), f[0].dot(f[2]), f[0].dot(f[1])};
  for (int it = 0; it < 5; ++it) {
    Eigen::Vector3d r;
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
      const int i = kPairs[k][0], j = kPairs[k][1];
      r(k) = s(i) * s(i) + s(j) * s(j) - 2.0 * s(i) * s(j) * cosines[k] - d2[k];
      jac(k, i) = 2.0 * s(i) - 2.0 * s(j) * cosines[k];
      jac(k, j) = 2.0 * s(j) - 2.0 * s(i) * cosines[k];
    }
    const Eigen::Vector3d step = jac.partialPivLu().solve(r);
    if (!step.allFinite()) return;
    const Eigen::Vector3d next = s - step;
    double rn = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int i = kPairs[k][0], j = kPairs[k][1];
      rn += std::pow(next(i) * next(i) + next(j) * next(j) -
                         2.0 * next(i) * next(j) * cosines[k] - d2[k],
                     2);
    }
    if (!(rn < r.squaredNorm())) return;
    s = next;
  }
}

}  // namespace

std::vector<RigidTransform> P3PSolve(const std::array<Correspondence, 3>& c,
                                     const CameraIntrinsics& intr) {
  for (const Correspondence& x : c) {
    if (!x.pixel.allFinite() || !x.world.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "p3p: non-finite input");
    }
  }
  const Eigen::Vector3d& p1 = c[0].world;
  const Eigen::Vector3d& p2 = c[1].world;
  const Eigen::Vector3d& p3 = c[2].world;
  if (0.5 * (p2 - p1).cross(p3 - p1).norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "p3p: world points are collinear");
  }
  if (c[0].pixel == c[1].pixel || c[0].pixel == c[2].pixel ||
      c[1].pixel == c[2].pixel) {
    throw Error(ErrorCode::kDegenerateGeometry, "p3p: repeated pixel");
  }

  const std::array<Eigen::Vector3d, 3> f = {
      Bearing(intr, c[0].pixel), Bearing(intr, c[1].pixel),
      Bearing(intr, c[2].pixel)};
  const double a2 = (p2 - p3).squaredNorm();
  const double b2 = (p1 - p3).squaredNorm();
  const double c2 = (p1 - p2).squaredNorm();
  const double cos_a = f[1].dot(f[2]);
  const double cos_b = f[0].dot(f[2]);
  const double cos_g = f[0].dot(f[1]);

  // With s2 = u s1 and s3 = v s1, eliminating u leaves u = N(v) / D(v) and
  //   D^2 + N^2 - 2 cos_g N D - (c^2/b^2)(1 + v^2 - 2 v cos_b) D^2 = 0.
  const double k = (a2 - c2) / b2;
  const double cb = c2 / b2;
  const std::vector<double> n_poly = {k - 1.0, -2.0 * k * cos_b, 1.0 + k};
  const std::vector<double> d_poly = {-2.0 * cos_a, 2.0 * cos_g};
  const std::vector<double> base = {1.0, -2.0 * cos_b, 1.0};
  const std::vector<double> dd = MultiplyPolynomials(d_poly, d_poly);
  const std::vector<double> nn = MultiplyPolynomials(n_poly, n_poly);
  const std::vector<double> nd = MultiplyPolynomials(n_poly, d_poly);
  const std::vector<double> bdd = MultiplyPolynomials(base, dd);
  std::array<double, 5> quartic{};
  auto add = [&](const std::vector<double>& p, double scale) {
    const std::size_t off = quartic.size() - p.size();
    for (std::size_t i = 0; i < p.size(); ++i) quartic[off + i] += scale * p[i];
  };
  add(dd, 1.0);
  add(nn, 1.0);
  add(nd, -2.0 * cos_g);
  add(bdd, -cb);

  std::vector<RigidTransform> solutions;
  const std::array<Eigen::Vector3d, 3> world = {p1, p2, p3};
  const std::array<double, 3> d2 = {a2, b2, c2};
  for (double v : RealPolynomialRoots(quartic, 1e-4)) {
    if (!(v > 0.0)) continue;
    const double d = EvaluatePolynomial(d_poly, v);
    if (std::abs(d) < 1e-14) continue;
    const double u = EvaluatePolynomial(n_poly, v) / d;
    if (!(u > 0.0)) continue;
    const double denom = 1.0 + v * v - 2.0 * v * cos_b;
    if (!(denom > 0.0)) continue;
    const double s1 = std::sqrt(b2 / denom);
    Eigen::Vector3d s(s1, u * s1, v * s1);
    RefineLengths(f, d2, s);
    if (!(s.array() > 0.0).all()) continue;

    const std::array<Eigen::Vector3d, 3> cam = {s(0) * f[0], s(1) * f[1],
                                                s(2) * f[2]};
    RigidTransform pose;
    try {
      pose = UmeyamaRigid(world, cam);
    } catch (const Error&) {
      continue;
    }
    bool exact = true;
    for (const Correspondence& x : c) {
      exact &= ReprojectionError(pose, intr, x) <= kMaxResidualPx;
    }
    if (!exact) continue;
    bool duplicate = false;
    for (const RigidTransform& other : solutions) {
      duplicate |= (other.rotation().quaternion().coeffs() -
                    pose.rotation().quaternion().coeffs())
                           .norm() < 1e-9 &&
                   (other.translation() - pose.translation()).norm() < 1e-9;
    }
    if (!duplicate) solutions.push_back(pose);
  }
  if (solutions.empty()) {
    throw Error(ErrorCode::kNoRealSolution,
                "p3p: no real solution reprojects the minimal set");
  }
  return solutions;
}

}  // namespace scrforge
