#include "scrforge/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "scrforge/config.h"
#include "scrforge/dataset.h"
#include "scrforge/error.h"
#include "scrforge/eval.h"
#include "scrforge/histmatch.h"
#include "scrforge/manifest.h"
#include "scrforge/parallel.h"
#include "scrforge/ply.h"
#include "scrforge/random.h"
#include "scrforge/registration.h"
#include "scrforge/toy_pipeline.h"
#include "scrforge/toy_scene.h"

namespace scrforge {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSynopsis =
    "usage: scrforge <command> [options]\n"
    "  render     --cloud PLY | --toy, --n N --out DIR [--intrinsics JSON]\n"
    "  histmatch  --source MANIFEST --target MANIFEST --out DIR [--per-image]\n"
    "  solve      --scmap SCM --intrinsics JSON --out JSON\n"
    "             | --manifest MANIFEST --out JSONL  [--stride S]\n"
    "  align      --src PLY --dst PLY [--init JSON] --out JSON\n"
    "             | --src-markers JSON --dst-markers JSON --out JSON\n"
    "  eval       --gt MANIFEST --est JSONL [--out JSON] [--table MD]\n"
    "  e2e-toy    --out DIR [--test-frames N] [--train-frames N]\n"
    "common: --seed N, --config TOML; '<command> --help' lists every flag\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options every subcommand takes.
struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;

  void Add(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "seed for all randomness");
    cmd->add_option("--config", config, "pipeline TOML");
  }
  PipelineConfig Load() const {
    PipelineConfig c =
        config.empty() ? PipelineConfig{} : LoadPipelineConfig(config);
    if (seed) {
      c.seed = *seed;
      c.toy.room.seed = *seed;
    }
    return c;
  }
};

void EnsureDir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
}

void EnsureParent(const fs::path& file) { EnsureDir(file.parent_path()); }

void WriteText(const fs::path& path, const std::string& text) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

// render

struct RenderArgs {
  Common common;
  std::string cloud, out, intrinsics;
  bool toy = false;
  std::size_t n = 0;
  std::size_t threads = 0;
};

void RunRender(const RenderArgs& a, std::ostream& out) {
  if (a.cloud.empty() == !a.toy) {
    throw UsageError("render needs exactly one of --cloud or --toy");
  }
  const PipelineConfig cfg = a.common.Load();
  const ColorPointCloud cloud =
      a.toy ? MakeToyRoom(cfg.toy.room) : LoadPly(a.cloud);
  const CameraIntrinsics intr =
      a.intrinsics.empty() ? ToyIntrinsics() : ReadIntrinsicsFile(a.intrinsics);
  RenderDatasetOptions options;
  options.num_frames = a.n;
  options.min_valid_fraction = cfg.render.min_valid_fraction;
  options.max_retries = cfg.render.max_retries;
  options.threads = a.threads;
  const RenderDatasetResult r = RenderDataset(
      cloud, cfg.SamplerFor(cloud), intr, cfg.render.splat, options, a.out);
  WriteJsonFile(fs::path(a.out) / "intrinsics.json", IntrinsicsToJson(intr));
  out << "wrote " << r.records.size() << " frames to " << r.manifest.string()
      << "\n";
}

// histmatch

struct HistmatchArgs {
  Common common;
  std::string source, target, out;
  bool per_image = false;
};

void RunHistmatch(const HistmatchArgs& a, std::ostream& out) {
  const PipelineConfig cfg = a.common.Load();
  const bool pooled = cfg.histmatch.pooled && !a.per_image;
  const fs::path src_dir = fs::path(a.source).parent_path();
  const fs::path tgt_dir = fs::path(a.target).parent_path();
  const std::vector<ManifestRecord> sources = ReadManifest(a.source);
  const std::vector<ManifestRecord> targets = ReadManifest(a.target);

  std::vector<RgbImage> target_images;
  for (const auto& r : targets) target_images.push_back(ReadPng(tgt_dir / r.rgb));
  const ChannelCdf target_cdf = ComputeCdf(target_images);
  target_images.clear();

  // Rendered holes stay out of the source statistics.
  std::vector<RgbImage> images;
  std::vector<ValidityMask> masks;
  for (const auto& r : sources) {
    images.push_back(ReadPng(src_dir / r.rgb));
    if (r.scmap) {
      ValidityMask m = ReadScm(src_dir / *r.scmap).mask;
      if (m.size() != images.back().pixel_count()) {
        throw Error(ErrorCode::kLengthMismatch,
                    "mask of " + r.id + " does not match its image");
      }
      masks.push_back(std::move(m));
    } else {
      masks.emplace_back(images.back().pixel_count(), 1);
    }
  }
  std::optional<ChannelCdf> pooled_cdf;
  if (pooled) pooled_cdf = ComputeCdf(images, masks);

  const fs::path out_dir = a.out;
  EnsureDir(out_dir / "rgb");
  const fs::path abs_out = fs::absolute(out_dir);
  std::vector<ManifestRecord> written;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const ChannelCdf src_cdf =
        pooled ? *pooled_cdf : ComputeCdf(images[i], &masks[i]);
    ManifestRecord rec = sources[i];
    rec.rgb = "rgb/" + rec.id + ".png";
    WritePng(out_dir / rec.rgb,
             MatchHistogram(images[i], src_cdf, target_cdf, &masks[i]));
    if (rec.scmap) {
      rec.scmap = fs::relative(fs::absolute(src_dir / *rec.scmap), abs_out)
                      .generic_string();
    }
    written.push_back(std::move(rec));
  }
  WriteManifest(out_dir / "manifest.jsonl", written);
  nlohmann::json cdfs;
  cdfs["target"] = CdfToJson(target_cdf);
  if (pooled_cdf) cdfs["source"] = CdfToJson(*pooled_cdf);
  cdfs["pooled"] = pooled;
  WriteJsonFile(out_dir / "cdf.json", cdfs);
  out << "matched " << written.size() << " images into "
      << (out_dir / "manifest.jsonl").string() << "\n";
}

// solve

struct SolveArgs {
  Common common;
  std::string scmap, intrinsics, manifest, out;
  std::optional<int> stride;
};

void RunSolve(const SolveArgs& a, std::ostream& out) {
  if (a.scmap.empty() == a.manifest.empty()) {
    throw UsageError("solve needs exactly one of --scmap or --manifest");
  }
  const PipelineConfig cfg = a.common.Load();
  const int stride = a.stride.value_or(cfg.stride);
  if (stride < 1) throw UsageError("--stride must be >= 1");

  if (!a.scmap.empty()) {
    if (a.intrinsics.empty()) throw UsageError("--scmap needs --intrinsics");
    const PoseEstimate est = SolveMap(ReadScm(a.scmap),
                                      ReadIntrinsicsFile(a.intrinsics),
                                      cfg.Ransac(), stride);
    EnsureParent(a.out);
    WriteJsonFile(a.out, PoseEstimateToJson(est));
    out << (est.valid ? "valid" : "invalid") << " pose, " << est.inlier_count
        << " inliers\n";
    return;
  }

  const fs::path dir = fs::path(a.manifest).parent_path();
  const std::vector<ManifestRecord> records = ReadManifest(a.manifest);
  std::vector<PoseEstimate> estimates(records.size());
  std::vector<std::string> ids(records.size());
  const RansacConfig base = cfg.Ransac();
  ParallelFor(records.size(), WorkerCount(), [&](std::size_t i) {
    const ManifestRecord& r = records[i];
    ids[i] = r.id;
    if (!r.scmap) return;  // stays invalid
    RansacConfig ransac = base;
    ransac.seed = MixSeed(base.seed, i);
    estimates[i] =
        SolveMap(ReadScm(dir / *r.scmap), r.intrinsics, ransac, stride);
  });
  EnsureParent(a.out);
  WriteEstimates(a.out, ids, estimates);
  std::size_t valid = 0;
  for (const auto& e : estimates) valid += e.valid;
  out << valid << "/" << estimates.size() << " valid poses\n";
}

// align

struct AlignArgs {
  Common common;
  std::string src, dst, init, src_markers, dst_markers, out;
};

std::vector<Eigen::Vector3d> ReadMarkers(const fs::path& path) {
  const nlohmann::json j = ReadJsonFile(path);
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError,
                path.string() + ": expected [[x, y, z], ...]");
  }
  std::vector<Eigen::Vector3d> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() ||
        !p[1].is_number() || !p[2].is_number()) {
      throw Error(ErrorCode::kParseError, path.string() + ": bad marker entry");
    }
    pts.emplace_back(p[0].get<double>(), p[1].get<double>(),
                     p[2].get<double>());
  }
  return pts;
}

void RunAlign(const AlignArgs& a, std::ostream& out) {
  const bool clouds = !a.src.empty() || !a.dst.empty();
  const bool markers = !a.src_markers.empty() || !a.dst_markers.empty();
  if (clouds == markers) {
    throw UsageError("align needs --src/--dst or --src-markers/--dst-markers");
  }
  const PipelineConfig cfg = a.common.Load();
  nlohmann::json result;
  if (markers) {
    if (a.src_markers.empty() || a.dst_markers.empty()) {
      throw UsageError("both --src-markers and --dst-markers are required");
    }
    const auto src = ReadMarkers(a.src_markers);
    const auto dst = ReadMarkers(a.dst_markers);
    const RigidTransform t = UmeyamaRigid(src, dst);
    double sum = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      sum += (t.Apply(src[i]) - dst[i]).squaredNorm();
    }
    result = PoseToJson(t);
    result["rms"] = std::sqrt(sum / double(src.size()));
  } else {
    if (a.src.empty() || a.dst.empty()) {
      throw UsageError("both --src and --dst are required");
    }
    const RigidTransform init =
        a.init.empty() ? RigidTransform() : PoseFromJson(ReadJsonFile(a.init));
    const IcpResult r = Icp(LoadPly(a.src), LoadPly(a.dst), init, cfg.Icp());
    result = PoseToJson(r.transform);
    result["rms"] = r.rms;
    result["iterations"] = r.iterations;
  }
  EnsureParent(a.out);
  WriteJsonFile(a.out, result);
  out << "rms " << result["rms"].get<double>() << " m\n";
}

// eval

struct EvalArgs {
  Common common;
  std::string gt, est, out, table, method = "estimate";
  std::string policy;
};

void RunEval(const EvalArgs& a, std::ostream& out) {
  const PipelineConfig cfg = a.common.Load();
  const PercentilePolicy policy = a.policy.empty()
                                      ? cfg.percentile_policy
                                      : ParsePercentilePolicy(a.policy);
  const EvalReport report = Aggregate(
      MatchErrors(ReadManifest(a.gt, false), ReadEstimates(a.est)), policy);
  const std::vector<std::pair<std::string, EvalReport>> rows = {
      {a.method, report}};
  const std::string table = ReportTable(rows);
  if (!a.out.empty()) {
    EnsureParent(a.out);
    WriteJsonFile(a.out, ReportToJson(report));
  }
  if (!a.table.empty()) WriteText(a.table, table);
  out << table;
}

// e2e-toy

struct ToyArgs {
  Common common;
  std::string out;
  std::optional<std::size_t> test_frames, train_frames, num_points;
  std::optional<double> corrupt_fraction;
};

void RunToy(const ToyArgs& a, std::ostream& out) {
  PipelineConfig cfg = a.common.Load();
  if (a.test_frames) cfg.toy.test_frames = *a.test_frames;
  if (a.train_frames) cfg.toy.train_frames = *a.train_frames;
  if (a.num_points) cfg.toy.room.num_points = *a.num_points;
  if (a.corrupt_fraction) cfg.toy.corrupt_fraction = *a.corrupt_fraction;
  EnsureDir(a.out);
  const ToyPipelineResult r = RunToyPipeline(cfg, a.out);
  std::ifstream table(r.report_table);
  out << table.rdbuf();
}

}  // namespace

int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app("Synthetic scene-coordinate data and pose estimation toolkit",
               "scrforge");
  app.require_subcommand(1);

  RenderArgs render;
  CLI::App* c_render = app.add_subcommand("render", "render a labeled dataset");
  render.common.Add(c_render);
  c_render->add_option("--cloud", render.cloud, "colored PLY point cloud");
  c_render->add_flag("--toy", render.toy, "use the procedural toy room");
  c_render->add_option("--n", render.n, "number of frames")->required();
  c_render->add_option("--out", render.out, "output directory")->required();
  c_render->add_option("--intrinsics", render.intrinsics,
                       "intrinsics JSON (default: toy camera)");
  c_render->add_option("--threads", render.threads,
                       "worker threads (0 = auto)");

  HistmatchArgs hist;
  CLI::App* c_hist =
      app.add_subcommand("histmatch", "match image colors to a target pool");
  hist.common.Add(c_hist);
  c_hist->add_option("--source", hist.source, "manifest of images to adjust")
      ->required();
  c_hist->add_option("--target", hist.target, "manifest of target photos")
      ->required();
  c_hist->add_option("--out", hist.out, "output directory")->required();
  c_hist->add_flag("--per-image", hist.per_image, "per-image source CDFs");

  SolveArgs solve;
  CLI::App* c_solve =
      app.add_subcommand("solve", "estimate poses from scene coordinates");
  solve.common.Add(c_solve);
  c_solve->add_option("--scmap", solve.scmap, "SCM1 map of one frame");
  c_solve->add_option("--intrinsics", solve.intrinsics, "intrinsics JSON");
  c_solve->add_option("--manifest", solve.manifest,
                      "solve every frame of a manifest");
  c_solve->add_option("--out", solve.out, "pose JSON or estimate JSONL")
      ->required();
  c_solve->add_option("--stride", solve.stride, "pixel sampling stride");

  AlignArgs align;
  CLI::App* c_align = app.add_subcommand("align", "rigidly align two frames");
  align.common.Add(c_align);
  c_align->add_option("--src", align.src, "source PLY");
  c_align->add_option("--dst", align.dst, "target PLY");
  c_align->add_option("--init", align.init, "initial transform JSON {q, t}");
  c_align->add_option("--src-markers", align.src_markers,
                      "JSON [[x, y, z], ...]");
  c_align->add_option("--dst-markers", align.dst_markers,
                      "JSON [[x, y, z], ...]");
  c_align->add_option("--out", align.out, "transform JSON")->required();

  EvalArgs eval;
  CLI::App* c_eval =
      app.add_subcommand("eval", "score estimates against ground truth");
  eval.common.Add(c_eval);
  c_eval->add_option("--gt", eval.gt, "ground-truth manifest")->required();
  c_eval->add_option("--est", eval.est, "estimate JSONL")->required();
  c_eval->add_option("--out", eval.out, "report JSON");
  c_eval->add_option("--table", eval.table, "markdown table");
  c_eval->add_option("--method", eval.method, "row label");
  c_eval->add_option("--policy", eval.policy, "exclude or penalize");

  ToyArgs toy;
  CLI::App* c_toy =
      app.add_subcommand("e2e-toy", "run the toy pipeline end to end");
  toy.common.Add(c_toy);
  c_toy->add_option("--out", toy.out, "output directory")->required();
  c_toy->add_option("--test-frames", toy.test_frames, "frames to localize");
  c_toy->add_option("--train-frames", toy.train_frames,
                    "labeled frames to render");
  c_toy->add_option("--num-points", toy.num_points, "points in the toy room");
  c_toy->add_option("--corrupt-fraction", toy.corrupt_fraction,
                    "share of scene coordinates replaced by noise");

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::Success&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs[0]->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return 2;
  }

  try {
    const std::string name = app.get_subcommands().at(0)->get_name();
    if (name == "render") RunRender(render, out);
    else if (name == "histmatch") RunHistmatch(hist, out);
    else if (name == "solve") RunSolve(solve, out);
    else if (name == "align") RunAlign(align, out);
    else if (name == "eval") RunEval(eval, out);
    else if (name == "e2e-toy") RunToy(toy, out);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace scrforge
