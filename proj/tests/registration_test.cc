#include "scrforge/registration.h"

#include <random>

#include "doctest.h"
#include "scrforge/error.h"
#include "test_util.h"

using namespace scrforge;
using scrforge::testing::DegToRad;
using scrforge::testing::RandomTransform;
using scrforge::testing::RandomUnitVector;
using scrforge::testing::RandomVector;

namespace {

std::vector<Eigen::Vector3d> RandomPoints(std::mt19937_64& rng, int n,
                                          double extent = 1.0) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) pts.push_back(RandomVector(rng, -extent, extent));
  return pts;
}

std::vector<Eigen::Vector3d> Apply(const RigidTransform& t,
                                   const std::vector<Eigen::Vector3d>& pts) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& p : pts) out.push_back(t.Apply(p));
  return out;
}

ColorPointCloud ToCloud(const std::vector<Eigen::Vector3d>& pts) {
  ColorPointCloud c;
  for (const auto& p : pts) c.push_back(p.cast<float>(), Rgb8{0, 0, 0});
  return c;
}

// A bumpy surface patch, so ICP has no sliding direction.
std::vector<Eigen::Vector3d> Surface(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    pts.emplace_back(x, y, 0.3 * std::sin(3 * x) * std::cos(2 * y) + 0.2 * x * x);
  }
  return pts;
}

void CheckClose(const RigidTransform& a, const RigidTransform& b, double tol) {
  CHECK((a.rotation().Matrix() - b.rotation().Matrix()).cwiseAbs().maxCoeff() <
        tol);
  CHECK((a.translation() - b.translation()).cwiseAbs().maxCoeff() < tol);
}

}  // namespace

TEST_CASE("umeyama on identical sets is the identity") {
  const std::vector<Eigen::Vector3d> pts = {
      {0, 0, 0}, {1, 0.2, 0}, {0.3, 1, 0.1}, {0.2, 0.4, 1}};
  CheckClose(UmeyamaRigid(pts, pts), RigidTransform(), 1e-9);
}

TEST_CASE("umeyama recovers random transforms") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const RigidTransform t0 = RandomTransform(rng);
    const auto src = RandomPoints(rng, 3 + trial % 20);
    const RigidTransform t = UmeyamaRigid(src, Apply(t0, src));
    CheckClose(t, t0, 1e-9);
    const Eigen::Matrix3d r = t.rotation().Matrix();
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("umeyama is left-equivariant") {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    const auto src = RandomPoints(rng, 10);
    const auto dst = RandomPoints(rng, 10);
    const RigidTransform r1 = RandomTransform(rng);
    const RigidTransform t = UmeyamaRigid(Apply(r1, src), dst);
    CheckClose(t * r1, UmeyamaRigid(src, dst), 1e-9);
  }
}

TEST_CASE("umeyama errors") {
  const std::vector<Eigen::Vector3d> two = {{0, 0, 0}, {1, 0, 0}};
  try {
    UmeyamaRigid(two, two);
    FAIL("expected TooFewPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewPoints);
  }
  const std::vector<Eigen::Vector3d> line = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  try {
    UmeyamaRigid(line, line);
    FAIL("expected DegenerateConfiguration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateConfiguration);
  }
  const std::vector<Eigen::Vector3d> three = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(UmeyamaRigid(three, two), Error);
}

TEST_CASE("icp on identical clouds") {
  std::mt19937_64 rng(73);
  const ColorPointCloud cloud = ToCloud(Surface(rng, 300));
  const IcpResult r = Icp(cloud, cloud, RigidTransform());
  CHECK(r.iterations == 1);
  CHECK(r.rms == 0.0);
  CheckClose(r.transform, RigidTransform(), 1e-12);
}

TEST_CASE("icp recovers a perturbed transform") {
  std::mt19937_64 rng(74);
  std::uniform_real_distribution<double> angle(0.0, 10.0);
  std::uniform_real_distribution<double> offset(0.0, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto src = Surface(rng, 1000);
    const RigidTransform t0 = RandomTransform(rng, 1.0);
    const ColorPointCloud dst = ToCloud(Apply(t0, src));
    const RigidTransform delta(
        Rotation::FromAxisAngle(RandomUnitVector(rng), DegToRad(angle(rng))),
        offset(rng) * RandomUnitVector(rng));
    const IcpResult r = Icp(ToCloud(src), dst, delta * t0);
    CHECK(r.rms < 1e-3);
    CHECK(r.iterations <= 50);
    for (std::size_t i = 1; i < r.rms_history.size(); ++i) {
      CHECK(r.rms_history[i] <= r.rms_history[i - 1] + 1e-12);
    }
    CHECK(RotationAngleDeg(r.transform.rotation(), t0.rotation()) < 0.1);
  }
}

TEST_CASE("icp without pairs in range") {
  std::mt19937_64 rng(75);
  const auto pts = Surface(rng, 100);
  const RigidTransform far(Rotation(), Eigen::Vector3d(100, 0, 0));
  try {
    Icp(ToCloud(pts), ToCloud(Apply(far, pts)), RigidTransform());
    FAIL("expected NoCorrespondences");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoCorrespondences);
  }
  CHECK_THROWS_AS(Icp(ColorPointCloud{}, ToCloud(pts), RigidTransform()), Error);
}

TEST_CASE("icp subsampling is seeded") {
  std::mt19937_64 rng(76);
  const auto src = Surface(rng, 2000);
  const RigidTransform t0(Rotation::AboutZDeg(3.0), Eigen::Vector3d(0.02, 0, 0));
  const ColorPointCloud dst = ToCloud(Apply(t0, src));
  IcpConfig cfg;
  cfg.max_source_points = 500;
  cfg.seed = 4;
  const IcpResult a = Icp(ToCloud(src), dst, RigidTransform(), cfg);
  const IcpResult b = Icp(ToCloud(src), dst, RigidTransform(), cfg);
  CHECK(a.transform.Matrix() == b.transform.Matrix());
  CHECK(a.rms < 1e-3);
}
