// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scrforge/config.h"
#include "scrforge/error.h"
#include "scrforge/eval.h"
#include "scrforge/histmatch.h"
#include "scrforge/p3p.h"
#include "scrforge/pnp_ransac.h"
#include "scrforge/registration.h"
#include "scrforge/renderer.h"
#include "scrforge/toy_pipeline.h"
#include "scrforge/toy_scene.h"
#include "test_util.h"

using namespace scrforge;
using namespace scrforge::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... T>
std::string Fmt(const char* f, T... args) {
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Outcome Reprojection() {
  const ColorPointCloud room = MakeToyRoom();
  const CameraIntrinsics k = ToyIntrinsics();
  const auto poses = PipelineConfig{}.SamplerFor(room);
  std::size_t valid = 0, consistent = 0;
  double worst = 0.0;
  for (const RigidTransform& pose : SamplePoses(poses, 100)) {
    const ReprojectionCheck c = CheckReprojection(Render(room, pose, k), 0.5);
    valid += c.valid_pixels;
    consistent += c.consistent_pixels;
    worst = std::max(worst, c.max_error_px);
  }
  return {valid > 0 && valid == consistent,
          Fmt("%zu/%zu valid pixels within 0.5 px, max %.3f px", consistent,
              valid, worst)};
}

Outcome P3P() {
  std::mt19937_64 rng(1001);
  const CameraIntrinsics k = DefaultIntrinsics();
  int hits = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const RigidTransform gt = RandomTransform(rng);
    std::array<Correspondence, 3> c;
    for (auto& x : c) {
      x.world = RandomVisiblePoint(rng, gt, k);
      const Projection p = Project(k, gt.Apply(x.world));
      x.pixel = {p.u, p.v};
    }
    double best = INFINITY;
    try {
      for (const RigidTransform& s : P3PSolve(c, k)) {
        best = std::min(best, RotationAngleDeg(s.rotation(), gt.rotation()));
      }
    } catch (const Error&) {
    }
    hits += best < 1e-4;
  }
  return {hits >= 995, Fmt("%d/%d instances recover the pose below 1e-4 deg",
                           hits, n)};
}

int CountGood(int trials, int n, double outliers, double sigma, double max_deg,
              double max_m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CameraIntrinsics k = DefaultIntrinsics();
  int good = 0;
  for (int t = 0; t < trials; ++t) {
    const PnpProblem p = MakePnpProblem(rng, k, n, outliers, sigma);
    RansacConfig cfg;
    cfg.seed = seed + t;
    const PoseEstimate est = PnpRansac(p.corrs, k, cfg);
    const PoseError e = ComputePoseError(p.gt, est);
    good += e.valid && e.rotation_deg < max_deg && e.translation_m < max_m;
  }
  return good;
}

Outcome RansacNoiseless() {
  const int good = CountGood(100, 50, 0.0, 0.0, 0.01, 1e-3, 2001);
  return {good == 100, Fmt("%d/100 trials below 0.01 deg and 1 mm", good)};
}

Outcome RansacRobust() {
  const int good = CountGood(100, 200, 0.3, 1.0, 1.0, 0.02, 3001);
  return {good >= 95, Fmt("%d/100 trials below 1 deg and 2 cm", good)};
}

Outcome Registration() {
  std::mt19937_64 rng(4001);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const RigidTransform t = RandomTransform(rng);
    std::vector<Eigen::Vector3d> src, dst;
    for (int j = 0; j < 10; ++j) {
      src.emplace_back(u(rng), u(rng), u(rng));
      dst.push_back(t.Apply(src.back()));
    }
    const RigidTransform got = UmeyamaRigid(src, dst);
    worst = std::max(
        {worst,
         (got.rotation().Matrix() - t.rotation().Matrix()).cwiseAbs().maxCoeff(),
         (got.translation() - t.translation()).cwiseAbs().maxCoeff()});
  }

  // ICP on a bumpy 1000-point patch.
  std::uniform_real_distribution<double> angle(0.0, 10.0), offset(0.0, 0.1);
  int converged = 0, monotone = 0, max_iters = 0;
  double worst_rms = 0.0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    ColorPointCloud src, dst;
    const RigidTransform t0 = RandomTransform(rng, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng), y = u(rng);
      const Eigen::Vector3d p(
          x, y, 0.3 * std::sin(3 * x) * std::cos(2 * y) + 0.2 * x * x);
      src.push_back(p.cast<float>(), Rgb8{0, 0, 0});
      dst.push_back(t0.Apply(p).cast<float>(), Rgb8{0, 0, 0});
    }
    const RigidTransform delta(
        Rotation::FromAxisAngle(RandomUnitVector(rng), DegToRad(angle(rng))),
        offset(rng) * RandomUnitVector(rng));
    const IcpResult r = Icp(src, dst, delta * t0);
    converged += r.rms < 1e-3 && r.iterations <= 50;
    bool mono = true;
    for (std::size_t i = 1; i < r.rms_history.size(); ++i) {
      mono = mono && r.rms_history[i] <= r.rms_history[i - 1];
    }
    monotone += mono;
    max_iters = std::max(max_iters, r.iterations);
    worst_rms = std::max(worst_rms, r.rms);
  }
  return {worst < 1e-9 && converged == trials && monotone == trials,
          Fmt("umeyama max error %.1e; icp %d/%d converged, %d/%d monotone, "
              "max rms %.1e m, max %d iterations",
              worst, converged, trials, monotone, trials, worst_rms, max_iters)};
}

// Moderate tone curves; see the histmatch unit tests for why.
RgbImage RandomImage(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 3> gamma{}, lo{}, hi{};
  for (int c = 0; c < 3; ++c) {
    gamma[c] = 0.5 + 1.5 * u(rng);
    lo[c] = 60.0 * u(rng);
    hi[c] = 180.0 + 75.0 * u(rng);
  }
  RgbImage img(w, h);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) {
      const double v = lo[c] + (hi[c] - lo[c]) * std::pow(u(rng), gamma[c]);
      img.data[3 * p + c] = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return img;
}

Outcome Histmatch() {
  std::mt19937_64 rng(5001);
  int decreased = 0, stable = 0;
  for (int i = 0; i < 100; ++i) {
    const RgbImage src = RandomImage(rng, 64, 48);
    const RgbImage tgt = RandomImage(rng, 64, 48);
    const ChannelCdf s = ComputeCdf(src), t = ComputeCdf(tgt);
    const auto before = KsDistance(s, t);
    const auto after = KsDistance(ComputeCdf(MatchHistogram(src, s, t)), t);
    decreased += after[0] < before[0] && after[1] < before[1] &&
                 after[2] < before[2];

    const RgbImage self = MatchHistogram(src, s, s);
    bool ok = true;
    for (std::size_t j = 0; j < src.data.size(); ++j) {
      ok = ok && std::abs(int(self.data[j]) - int(src.data[j])) <= 1;
    }
    stable += ok;
  }
  return {decreased == 100 && stable == 100,
          Fmt("KS decreased on %d/100 pairs; self-match within 1 level on "
              "%d/100",
              decreased, stable)};
}

// Order-statistic percentile straight from the definition.
double OraclePercentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double rank = p * double(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
  return v[lo] + (rank - double(lo)) * (v[hi] - v[lo]);
}

double OracleMedian(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome Eval() {
  std::mt19937_64 rng(6001);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  int matched = 0, round_trips = 0;
  for (int n = 1; n <= 200; ++n) {
    std::vector<PoseError> errors(n);
    std::vector<double> rot, trans;
    for (auto& e : errors) {
      e.rotation_deg = u(rng);
      e.translation_m = u(rng) / 10;
      rot.push_back(e.rotation_deg);
      trans.push_back(e.translation_m);
    }
    const EvalReport r = Aggregate(errors);
    const auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
    };
    matched += close(r.rotation_deg.median, OracleMedian(rot)) &&
               close(r.translation_m.median, OracleMedian(trans)) &&
               close(r.rotation_deg.p95, OraclePercentile(rot, 0.95)) &&
               close(r.translation_m.p95, OraclePercentile(trans, 0.95));
    errors.push_back({0, 0, false});
    const EvalReport with_invalid = Aggregate(errors, PercentilePolicy::kPenalize);
    round_trips +=
        ReportFromJson(nlohmann::json::parse(ReportToJson(r).dump())) == r &&
        ReportFromJson(nlohmann::json::parse(ReportToJson(with_invalid).dump())) ==
            with_invalid;
  }
  return {matched == 200 && round_trips == 200,
          Fmt("%d/200 lengths match the sort oracle; %d/200 reports round-trip",
              matched, round_trips)};
}

Outcome EndToEnd() {
  const fs::path dir = fs::temp_directory_path() / "scrforge_acceptance_e2e";
  fs::remove_all(dir);
  PipelineConfig cfg;
  cfg.toy.test_frames = 200;
  cfg.toy.corrupt_fraction = 0.4;
  const ToyPipelineResult r = RunToyPipeline(cfg, dir);
  fs::remove_all(dir);
  const auto ok = [](const EvalReport& e) {
    return e.rotation_deg.median < 1.0 && e.translation_m.median < 0.01;
  };
  return {r.oracle.frame_count == 200 && ok(r.oracle) && ok(r.corrupted),
          Fmt("oracle median %.4f deg / %.4f m; 40%% corrupted %.4f deg / "
              "%.4f m over %zu frames",
              r.oracle.rotation_deg.median, r.oracle.translation_m.median,
              r.corrupted.rotation_deg.median,
              r.corrupted.translation_m.median, r.oracle.frame_count)};
}

struct Criterion {
  const char* name;
  double budget_s;  // <= 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reprojection invariant", 60, Reprojection},
      {"p3p correctness", 10, P3P},
      {"pnp-ransac noiseless", 0, RansacNoiseless},
      {"pnp-ransac robust", 0, RansacRobust},
      {"registration", 0, Registration},
      {"histogram matching", 0, Histmatch},
      {"eval metrics", 0, Eval},
      {"end-to-end toy pipeline", 300, EndToEnd},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::string detail = o.detail;
    if (c.budget_s > 0) {
      detail += Fmt("; %.2f s (limit %.0f s)", secs, c.budget_s);
      if (secs >= c.budget_s) o.pass = false;
    } else {
      detail += Fmt("; %.2f s", secs);
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
