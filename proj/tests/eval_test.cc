#include "scrforge/eval.h"

#include <algorithm>
#include <limits>
#include <random>

#include "doctest.h"
#include "scrforge/error.h"
#include "test_util.h"

using namespace scrforge;
using scrforge::testing::RandomTransform;

namespace {

// Percentile straight from the definition, on its own sorted copy.
double OraclePercentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double rank = p * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= v.size()) return v[lo];
  return v[lo] + (rank - lo) * (v[lo + 1] - v[lo]);
}

}  // namespace

TEST_CASE("pose error examples") {
  std::mt19937_64 rng(81);
  const RigidTransform gt = RandomTransform(rng);
  const PoseError same = ComputePoseError(gt, gt);
  CHECK(same.rotation_deg < 1e-5);
  CHECK(same.translation_m < 1e-12);

  // Rotate 5 degrees about the camera's own center.
  const RigidTransform est = RigidTransform::FromCenter(
      Rotation::AboutZDeg(5.0) * gt.rotation(), gt.Center());
  const PoseError e = ComputePoseError(gt, est);
  CHECK(e.rotation_deg == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(e.translation_m < 1e-9);

  PoseEstimate invalid;
  invalid.valid = false;
  CHECK_FALSE(ComputePoseError(gt, invalid).valid);
}

TEST_CASE("pose error ignores a common world transform") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform gt = RandomTransform(rng);
    const RigidTransform est = RandomTransform(rng);
    const RigidTransform w = RandomTransform(rng);
    const PoseError a = ComputePoseError(gt, est);
    const PoseError b = ComputePoseError(gt * w, est * w);
    CHECK(std::abs(a.rotation_deg - b.rotation_deg) < 1e-9);
    CHECK(std::abs(a.translation_m - b.translation_m) < 1e-9);
  }
}

TEST_CASE("odd-count median") {
  const std::vector<PoseError> errs = {
      {1, 0.1, true}, {2, 0.2, true}, {3, 0.3, true}};
  const EvalReport r = Aggregate(errs);
  CHECK(r.rotation_deg.median == 2.0);
  CHECK(r.translation_m.median == 0.2);
  CHECK(r.rotation_deg.mean == 2.0);
  CHECK(r.invalid_fraction == 0.0);
}

TEST_CASE("invalid fraction and policies") {
  std::vector<PoseError> errs;
  for (int i = 0; i < 10; ++i) errs.push_back({double(i), 0.01 * i, i != 3});
  const EvalReport ex = Aggregate(errs);
  CHECK(ex.invalid_fraction == doctest::Approx(0.1));
  CHECK(ex.valid_count == 9);
  CHECK(ex.rotation_deg.median == 5.0);  // of 0,1,2,4,...,9

  const EvalReport pen = Aggregate(errs, PercentilePolicy::kPenalize);
  CHECK(pen.invalid_fraction == ex.invalid_fraction);
  CHECK(std::isinf(pen.rotation_deg.p95));
  CHECK(pen.rotation_deg.median == OraclePercentile(
      {0, 1, 2, 4, 5, 6, 7, 8, 9, std::numeric_limits<double>::infinity()}, 0.5));
  CHECK(pen.rotation_deg.mean == ex.rotation_deg.mean);

  const std::vector<PoseError> none = {{0, 0, false}};
  const EvalReport all_bad = Aggregate(none);
  CHECK(all_bad.invalid_fraction == 1.0);
  CHECK(std::isinf(all_bad.rotation_deg.median));
}

TEST_CASE("empty list") {
  try {
    Aggregate(std::vector<PoseError>{});
    FAIL("expected EmptyList");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyList);
  }
}

TEST_CASE("aggregate matches the sort oracle for every length") {
  std::mt19937_64 rng(83);
  std::exponential_distribution<double> d(0.5);
  for (int n = 1; n <= 200; ++n) {
    std::vector<PoseError> errs;
    std::vector<double> rot, trans;
    for (int i = 0; i < n; ++i) {
      errs.push_back({d(rng), d(rng), true});
      rot.push_back(errs.back().rotation_deg);
      trans.push_back(errs.back().translation_m);
    }
    const EvalReport r = Aggregate(errs);
    CHECK(r.rotation_deg.median == OraclePercentile(rot, 0.5));
    CHECK(r.rotation_deg.p95 == OraclePercentile(rot, 0.95));
    CHECK(r.translation_m.median == OraclePercentile(trans, 0.5));
    CHECK(r.translation_m.p95 == OraclePercentile(trans, 0.95));
    CHECK(r.rotation_deg.median <= r.rotation_deg.p95);
  }
}

TEST_CASE("report json round trip") {
  std::vector<PoseError> errs = {{1.5, 0.25, true}, {0.1, 1.0 / 3.0, true},
                                 {7, 7, false}};
  for (auto policy : {PercentilePolicy::kExclude, PercentilePolicy::kPenalize}) {
    const EvalReport r = Aggregate(errs, policy);
    const EvalReport back =
        ReportFromJson(nlohmann::json::parse(ReportToJson(r).dump()));
    CHECK(back == r);
  }
  CHECK_THROWS_AS(ReportFromJson(nlohmann::json{{"frame_count", 1}}), Error);
}

TEST_CASE("markdown table") {
  const std::vector<PoseError> errs = {{2.9, 0.17, true}};
  const std::vector<std::pair<std::string, EvalReport>> rows = {
      {"oracle", Aggregate(errs)}};
  const std::string t = ReportTable(rows);
  CHECK(t.find("| Method") == 0);
  CHECK(t.find("2.90°, 0.170 m") != std::string::npos);
  CHECK(t.find("0.0%") != std::string::npos);
}
