#include "scrforge/correspondences.h"

#include <set>
#include <utility>

#include "doctest.h"
#include "scrforge/error.h"
#include "scrforge/renderer.h"
#include "scrforge/toy_scene.h"

using namespace scrforge;

namespace {

SceneCoordMap FullMap(int w, int h) {
  SceneCoordMap m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, Eigen::Vector3f(x, y, 1.f));
  }
  return m;
}

}  // namespace

TEST_CASE("all-invalid map yields nothing") {
  CHECK(SampleCorrespondences(SceneCoordMap(32, 32), 8).empty());
  CHECK(GridCorrespondences(SceneCoordMap(4, 4), 8).empty());
}

TEST_CASE("16x16 map with stride 8") {
  const auto c = SampleCorrespondences(FullMap(16, 16), 8);
  REQUIRE(c.size() == 4);
  std::set<std::pair<int, int>> pixels;
  for (const auto& x : c) {
    // Centers of pixels (4, 4), (12, 4), (4, 12), (12, 12).
    const int px = static_cast<int>(x.pixel.x() - 0.5);
    const int py = static_cast<int>(x.pixel.y() - 0.5);
    CHECK(x.pixel.x() == px + 0.5);
    pixels.insert({px, py});
    CHECK(x.world.x() == px);
    CHECK(x.world.y() == py);
  }
  CHECK(pixels == std::set<std::pair<int, int>>{{4, 4}, {12, 4}, {4, 12}, {12, 12}});
}

TEST_CASE("stride 1 and partial cells") {
  CHECK(SampleCorrespondences(FullMap(5, 3), 1).size() == 15);
  // 20 = 2 full cells + a partial one whose sample pixel 20 is outside.
  CHECK(SampleCorrespondences(FullMap(20, 8), 8).size() == 2);
  CHECK(SampleCorrespondences(FullMap(21, 8), 8).size() == 3);
  CHECK_THROWS_AS(SampleCorrespondences(FullMap(4, 4), 0), Error);
}

TEST_CASE("grid cells map to the pixel a full map would sample") {
  const SceneCoordMap full = FullMap(32, 24);
  SceneCoordMap grid(4, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 4; ++i) grid.set(i, j, full.at(8 * i + 4, 8 * j + 4));
  }
  const auto a = SampleCorrespondences(full, 8);
  const auto b = GridCorrespondences(grid, 8);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pixel == b[i].pixel);
    CHECK(a[i].world == b[i].world);
  }

  CameraIntrinsics k{500, 500, 16, 12, 32, 24};
  CHECK(CorrespondencesForImage(full, k, 8).size() == a.size());
  CHECK(CorrespondencesForImage(grid, k, 8).size() == b.size());
  CHECK_THROWS_AS(CorrespondencesForImage(SceneCoordMap(7, 5), k), Error);
}

TEST_CASE("sampled toy correspondences reproject onto their pixels") {
  const ColorPointCloud room = MakeToyRoom({.num_points = 40000, .seed = 3});
  const CameraIntrinsics k = ToyIntrinsics();
  PoseSamplerConfig cfg;
  cfg.aabb = DefaultSamplerAabb(room);
  cfg.seed = 8;
  for (const RigidTransform& pose : SamplePoses(cfg, 3)) {
    const SceneCoordFrame f = Render(room, pose, k);
    const auto corrs = SampleCorrespondences(f.scmap, 8);
    CHECK(!corrs.empty());
    for (const auto& c : corrs) {
      const Projection p = Project(k, pose.Apply(c.world));
      CHECK(std::abs(p.u - c.pixel.x()) <= 0.5);
      CHECK(std::abs(p.v - c.pixel.y()) <= 0.5);
    }
  }
}
