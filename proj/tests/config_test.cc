#include "scrforge/config.h"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "scrforge/error.h"

using namespace scrforge;

namespace {

ErrorCode CodeOf(const std::string& text) {
  try {
    ParsePipelineConfig(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for: " << text);
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("empty config is all defaults") {
  const PipelineConfig c = ParsePipelineConfig("");
  const PipelineConfig d;
  CHECK(c.seed == 0);
  CHECK(c.render.splat.point_size == d.render.splat.point_size);
  CHECK(c.render.min_height == 1.0);
  CHECK(c.render.max_height == 1.6);
  CHECK(c.ransac.inlier_threshold_px == 10.0);
  CHECK(c.ransac.confidence == 0.99);
  CHECK(c.ransac.max_iterations == 1000);
  CHECK(c.ransac.min_inliers == 12);
  CHECK(c.stride == 8);
  CHECK(c.icp.max_iterations == 50);
  CHECK(c.icp.convergence_threshold == 1e-6);
  CHECK(c.icp.max_correspondence_distance == 0.5);
  CHECK(c.toy.room.num_points == 200000);
  CHECK(c.histmatch.pooled);
  CHECK(c.percentile_policy == PercentilePolicy::kExclude);
}

TEST_CASE("values are read from every section") {
  const PipelineConfig c = ParsePipelineConfig(R"(
seed = 17
[render]
point_size = 0.02
max_retries = 3
min_height = 1
[histmatch]
pooled = false
[pnp]
inlier_threshold_px = 4.5
stride = 4
[icp]
max_iterations = 10
[toy]
num_points = 5000
test_frames = 12
corrupt_fraction = 0.25
[eval]
percentile_policy = "penalize"
)");
  CHECK(c.seed == 17);
  CHECK(c.render.splat.point_size == 0.02);
  CHECK(c.render.max_retries == 3);
  CHECK(c.render.min_height == 1.0);
  CHECK_FALSE(c.histmatch.pooled);
  CHECK(c.ransac.inlier_threshold_px == 4.5);
  CHECK(c.stride == 4);
  CHECK(c.icp.max_iterations == 10);
  CHECK(c.toy.room.num_points == 5000);
  CHECK(c.toy.room.seed == 17);
  CHECK(c.toy.test_frames == 12);
  CHECK(c.toy.corrupt_fraction == 0.25);
  CHECK(c.percentile_policy == PercentilePolicy::kPenalize);
}

TEST_CASE("derived seeds follow the top-level seed") {
  PipelineConfig a, b;
  a.seed = 1;
  b.seed = 2;
  CHECK(a.Ransac().seed != b.Ransac().seed);
  CHECK(a.Ransac().seed != a.Icp().seed);
  CHECK(a.Ransac().seed == PipelineConfig(a).Ransac().seed);
}

TEST_CASE("bad configs are rejected") {
  CHECK(CodeOf("bogus = 1") == ErrorCode::kConfigError);
  CHECK(CodeOf("[render]\nspeed = 3") == ErrorCode::kConfigError);
  CHECK(CodeOf("[nope]\nx = 1") == ErrorCode::kConfigError);
  CHECK(CodeOf("[pnp]\nmax_iterations = 1.5") == ErrorCode::kConfigError);
  CHECK(CodeOf("[pnp]\nconfidence = 1.0") == ErrorCode::kConfigError);
  CHECK(CodeOf("[render]\nmin_height = 2.0\nmax_height = 1.0") ==
        ErrorCode::kConfigError);
  CHECK(CodeOf("render = 3") == ErrorCode::kConfigError);
  CHECK(CodeOf("seed = -1") == ErrorCode::kConfigError);
  CHECK(CodeOf("[eval]\npercentile_policy = \"median\"") ==
        ErrorCode::kConfigError);
  CHECK(CodeOf("this is not toml") == ErrorCode::kConfigError);
}

TEST_CASE("load from file") {
  const auto dir = std::filesystem::temp_directory_path() / "scrforge_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.toml") << "seed = 5\n";
    std::ofstream(dir / "bad.toml") << "[icp]\nfoo = 1\n";
  }
  CHECK(LoadPipelineConfig(dir / "ok.toml").seed == 5);
  try {
    LoadPipelineConfig(dir / "bad.toml");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
    CHECK(std::string(e.what()).find("icp.foo") != std::string::npos);
  }
  CHECK_THROWS_AS(LoadPipelineConfig(dir / "missing.toml"), Error);
  std::filesystem::remove_all(dir);
}
