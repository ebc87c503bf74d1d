#include "scrforge/toy_pipeline.h"

#include <fstream>
#include <map>

#include "scrforge/correspondences.h"
#include "scrforge/dataset.h"
#include "scrforge/error.h"
#include "scrforge/parallel.h"
#include "scrforge/random.h"
#include "scrforge/toy_scene.h"

namespace scrforge {

namespace fs = std::filesystem;

namespace {

enum : std::uint64_t {
  kTrainStream = 11,
  kTestStream = 12,
  kCorruptStream = 13,
  kSolveStream = 14,
};

}  // namespace

PoseEstimate SolveMap(const SceneCoordMap& map, const CameraIntrinsics& intr,
                      const RansacConfig& cfg, int stride) {
  const std::vector<Correspondence> corrs =
      CorrespondencesForImage(map, intr, stride);
  if (corrs.size() < 4) {
    PoseEstimate invalid;
    invalid.inlier_mask.assign(corrs.size(), 0);
    return invalid;
  }
  return PnpRansac(corrs, intr, cfg);
}

void WriteEstimates(const fs::path& path, const std::vector<std::string>& ids,
                    const std::vector<PoseEstimate>& estimates) {
  if (ids.size() != estimates.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ids and estimates differ in length");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    nlohmann::json j = PoseEstimateToJson(estimates[i]);
    j["id"] = ids[i];
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::vector<std::pair<std::string, PoseEstimate>> ReadEstimates(
    const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::pair<std::string, PoseEstimate>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw Error(ErrorCode::kParseError, "estimate needs a string id");
      }
      out.emplace_back(j["id"].get<std::string>(), PoseEstimateFromJson(j));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" +
                                              std::to_string(line_no) + ": " +
                                              e.what());
    }
  }
  return out;
}

std::vector<PoseError> MatchErrors(
    const std::vector<ManifestRecord>& gt,
    const std::vector<std::pair<std::string, PoseEstimate>>& estimates) {
  std::map<std::string, const PoseEstimate*> by_id;
  for (const auto& [id, est] : estimates) by_id[id] = &est;
  std::vector<PoseError> errors;
  for (const ManifestRecord& r : gt) {
    if (!r.pose) continue;
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      errors.push_back({0.0, 0.0, false});
    } else {
      errors.push_back(ComputePoseError(*r.pose, *it->second));
    }
  }
  if (errors.empty()) {
    throw Error(ErrorCode::kEmptyList, "no posed ground-truth frames");
  }
  return errors;
}

void CorruptMap(SceneCoordMap& map, double fraction, const BoundingBox& box,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (!map.valid(x, y)) continue;
      if (Uniform01(rng) >= fraction) continue;
      const Eigen::Vector3d p(UniformRange(rng, box.min.x(), box.max.x()),
                              UniformRange(rng, box.min.y(), box.max.y()),
                              UniformRange(rng, box.min.z(), box.max.z()));
      map.set(x, y, p.cast<float>());
    }
  }
}

ToyPipelineResult RunToyPipeline(const PipelineConfig& config,
                                 const fs::path& out_dir) {
  config.Validate();
  ToyRoomOptions room_options = config.toy.room;
  room_options.seed = config.seed;
  const ColorPointCloud room = MakeToyRoom(room_options);
  const CameraIntrinsics intr = ToyIntrinsics();
  const BoundingBox box = ComputeBoundingBox(room);

  PoseSamplerConfig sampler = config.SamplerFor(room);
  RenderDatasetOptions options;
  options.min_valid_fraction = config.render.min_valid_fraction;
  options.max_retries = config.render.max_retries;

  options.num_frames = config.toy.train_frames;
  options.id_prefix = "train";
  sampler.seed = MixSeed(config.seed, kTrainStream);
  RenderDataset(room, sampler, intr, config.render.splat, options,
                out_dir / "train");

  options.num_frames = config.toy.test_frames;
  options.id_prefix = "test";
  sampler.seed = MixSeed(config.seed, kTestStream);
  const RenderDatasetResult test = RenderDataset(
      room, sampler, intr, config.render.splat, options, out_dir / "test");

  const std::size_t n = test.records.size();
  std::vector<PoseEstimate> clean(n), noisy(n);
  std::vector<std::string> ids(n);
  const fs::path test_dir = out_dir / "test";
  ParallelFor(n, WorkerCount(), [&](std::size_t i) {
    const ManifestRecord& rec = test.records[i];
    ids[i] = rec.id;
    SceneCoordMap map = ReadScm(test_dir / *rec.scmap);
    RansacConfig ransac = config.Ransac();
    ransac.seed = MixSeed(ransac.seed, i);
    clean[i] = SolveMap(map, intr, ransac, config.stride);
    CorruptMap(map, config.toy.corrupt_fraction, box,
               MixSeed(MixSeed(config.seed, kCorruptStream), i));
    ransac.seed = MixSeed(MixSeed(config.seed, kSolveStream), i);
    noisy[i] = SolveMap(map, intr, ransac, config.stride);
  });
  WriteEstimates(out_dir / "estimates_oracle.jsonl", ids, clean);
  WriteEstimates(out_dir / "estimates_corrupted.jsonl", ids, noisy);

  ToyPipelineResult result;
  std::vector<std::pair<std::string, PoseEstimate>> tagged(n);
  for (std::size_t i = 0; i < n; ++i) tagged[i] = {ids[i], clean[i]};
  result.oracle =
      Aggregate(MatchErrors(test.records, tagged), config.percentile_policy);
  for (std::size_t i = 0; i < n; ++i) tagged[i] = {ids[i], noisy[i]};
  result.corrupted =
      Aggregate(MatchErrors(test.records, tagged), config.percentile_policy);

  char corrupted_name[64];
  std::snprintf(corrupted_name, sizeof(corrupted_name),
                "oracle coordinates, %.0f%% corrupted",
                100.0 * config.toy.corrupt_fraction);
  const std::vector<std::pair<std::string, EvalReport>> rows = {
      {"oracle coordinates", result.oracle}, {corrupted_name, result.corrupted}};
  nlohmann::json report;
  report["oracle"] = ReportToJson(result.oracle);
  report["corrupted"] = ReportToJson(result.corrupted);
  report["corrupt_fraction"] = config.toy.corrupt_fraction;
  report["seed"] = config.seed;
  result.report_json = out_dir / "report.json";
  result.report_table = out_dir / "report.md";
  WriteJsonFile(result.report_json, report);
  std::ofstream table(result.report_table, std::ios::trunc);
  table << ReportTable(rows);
  if (!table) {
    throw Error(ErrorCode::kIoError, "cannot write " + result.report_table.string());
  }
  return result;
}

}  // namespace scrforge
