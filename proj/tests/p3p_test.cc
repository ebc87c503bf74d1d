#include "scrforge/p3p.h"

#include <random>

#include "doctest.h"
#include "scrforge/error.h"
#include "scrforge/polynomial.h"
#include "test_util.h"

using namespace scrforge;
using scrforge::testing::DefaultIntrinsics;
using scrforge::testing::RandomTransform;
using scrforge::testing::RandomVisiblePoint;

namespace {

Correspondence Observe(const RigidTransform& pose, const CameraIntrinsics& k,
                       const Eigen::Vector3d& world) {
  const Projection p = Project(k, pose.Apply(world));
  return {Eigen::Vector2d(p.u, p.v), world};
}

double BestRotationError(const std::vector<RigidTransform>& sols,
                         const RigidTransform& gt) {
  double best = 180.0;
  for (const auto& s : sols) {
    best = std::min(best, RotationAngleDeg(s.rotation(), gt.rotation()));
  }
  return best;
}

}  // namespace

TEST_CASE("polynomial roots") {
  // (x - 1)(x - 2)(x + 3)(x^2 + 1)
  std::vector<double> p = MultiplyPolynomials(std::vector<double>{1, -1},
                                              std::vector<double>{1, -2});
  p = MultiplyPolynomials(p, std::vector<double>{1, 3});
  p = MultiplyPolynomials(p, std::vector<double>{1, 0, 1});
  const std::vector<double> roots = RealPolynomialRoots(p);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(roots[2] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(RealPolynomialRoots(std::vector<double>{0, 0, 2, -4}) ==
        std::vector<double>{2.0});
  CHECK(RealPolynomialRoots(std::vector<double>{1, 0, 1}).empty());
  CHECK(EvaluatePolynomial(std::vector<double>{2, 0, -1}, 3.0) == 17.0);
}

TEST_CASE("identity pose is among the solutions") {
  const CameraIntrinsics k = DefaultIntrinsics();
  const RigidTransform id;
  const std::array<Correspondence, 3> c = {
      Observe(id, k, {0.3, -0.2, 2.0}), Observe(id, k, {-0.5, 0.1, 3.0}),
      Observe(id, k, {0.2, 0.4, 2.5})};
  const auto sols = P3PSolve(c, k);
  REQUIRE(!sols.empty());
  CHECK(sols.size() <= 4);
  bool found = false;
  for (const auto& s : sols) {
    found |= RotationAngleDeg(s.rotation(), id.rotation()) < 1e-6 &&
             s.translation().norm() < 1e-6;
    for (const auto& x : c) CHECK(ReprojectionError(s, k, x) <= 1e-6);
  }
  CHECK(found);
}

TEST_CASE("degenerate inputs") {
  const CameraIntrinsics k = DefaultIntrinsics();
  const RigidTransform id;
  std::array<Correspondence, 3> c = {Observe(id, k, {0, 0, 2}),
                                     Observe(id, k, {1, 0, 3}),
                                     Observe(id, k, {2, 0, 4})};
  try {
    P3PSolve(c, k);
    FAIL("expected DegenerateGeometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateGeometry);
  }
  c = {Observe(id, k, {0, 0, 2}), Observe(id, k, {0, 0, 4}),
       Observe(id, k, {1, 1, 3})};
  // First two share a pixel.
  CHECK_THROWS_AS(P3PSolve(c, k), Error);
}

TEST_CASE("random poses and triangles") {
  const CameraIntrinsics k = DefaultIntrinsics();
  std::mt19937_64 rng(51);
  int hits = 0, total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform gt = RandomTransform(rng);
    std::array<Correspondence, 3> c;
    for (auto& x : c) x = Observe(gt, k, RandomVisiblePoint(rng, gt, k));
    std::vector<RigidTransform> sols;
    try {
      sols = P3PSolve(c, k);
    } catch (const Error&) {
      ++total;
      continue;
    }
    ++total;
    for (const auto& s : sols) {
      for (const auto& x : c) CHECK(ReprojectionError(s, k, x) <= 1e-6);
    }
    hits += BestRotationError(sols, gt) < 1e-4;
  }
  CHECK(total == 100);
  CHECK(hits >= 99);
}

TEST_CASE("reprojection error behind the camera is infinite") {
  const CameraIntrinsics k = DefaultIntrinsics();
  const Correspondence c{{320, 180}, {0, 0, -1}};
  CHECK(std::isinf(ReprojectionError(RigidTransform(), k, c)));
}
