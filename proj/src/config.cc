#include "scrforge/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "scrforge/error.h"
#include "scrforge/random.h"
#include "toml.hpp"

namespace scrforge {

namespace {

// Seed streams for the stages.
enum : std::uint64_t { kSamplerStream = 1, kRansacStream = 2, kIcpStream = 3 };

[[noreturn]] void Fail(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

Setter Real(double& out) {
  return [&out](const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<double>()) {
      out = *v;
    } else if (auto i = n.value_exact<std::int64_t>()) {
      out = static_cast<double>(*i);
    } else {
      Fail(key + " must be a number");
    }
  };
}

template <typename Int>
Setter Integer(Int& out) {
  return [&out](const toml::node& n, const std::string& key) {
    const auto v = n.value_exact<std::int64_t>();
    if (!v) Fail(key + " must be an integer");
    if (*v < 0 && std::is_unsigned_v<Int>) Fail(key + " must be non-negative");
    out = static_cast<Int>(*v);
  };
}

Setter Boolean(bool& out) {
  return [&out](const toml::node& n, const std::string& key) {
    const auto v = n.value_exact<bool>();
    if (!v) Fail(key + " must be a boolean");
    out = *v;
  };
}

Setter Policy(PercentilePolicy& out) {
  return [&out](const toml::node& n, const std::string& key) {
    const auto v = n.value_exact<std::string>();
    if (!v) Fail(key + " must be a string");
    try {
      out = ParsePercentilePolicy(*v);
    } catch (const Error& e) {
      Fail(key + ": " + e.what());
    }
  };
}

void Apply(const toml::table& table, const std::string& prefix,
           const std::map<std::string, Setter>& setters) {
  for (const auto& [k, node] : table) {
    const std::string key = prefix + std::string(k.str());
    const auto it = setters.find(std::string(k.str()));
    if (it == setters.end()) Fail("unknown key " + key);
    it->second(node, key);
  }
}

}  // namespace

PoseSamplerConfig PipelineConfig::SamplerFor(const ColorPointCloud& cloud) const {
  PoseSamplerConfig s;
  s.aabb = DefaultSamplerAabb(cloud, render.aabb_margin);
  s.min_height = render.min_height;
  s.max_height = render.max_height;
  s.yaw_min_deg = render.yaw_min_deg;
  s.yaw_max_deg = render.yaw_max_deg;
  s.max_pitch_deg = render.max_pitch_deg;
  s.max_roll_deg = render.max_roll_deg;
  s.seed = MixSeed(seed, kSamplerStream);
  return s;
}

RansacConfig PipelineConfig::Ransac() const {
  RansacConfig r = ransac;
  r.seed = MixSeed(seed, kRansacStream);
  return r;
}

IcpConfig PipelineConfig::Icp() const {
  IcpConfig c = icp;
  c.seed = MixSeed(seed, kIcpStream);
  return c;
}

void PipelineConfig::Validate() const {
  try {
    ransac.Validate();
    icp.Validate();
  } catch (const Error& e) {
    Fail(e.what());
  }
  if (!(render.splat.point_size > 0.0)) Fail("render.point_size must be > 0");
  if (!(render.min_height <= render.max_height)) {
    Fail("render.min_height must not exceed render.max_height");
  }
  if (!(render.yaw_min_deg <= render.yaw_max_deg)) {
    Fail("render.yaw_min_deg must not exceed render.yaw_max_deg");
  }
  if (!(render.max_pitch_deg >= 0.0 && render.max_pitch_deg < 90.0) ||
      !(render.max_roll_deg >= 0.0 && render.max_roll_deg <= 180.0)) {
    Fail("render pitch must be in [0, 90) and roll in [0, 180]");
  }
  if (!(render.min_valid_fraction >= 0.0 && render.min_valid_fraction <= 1.0)) {
    Fail("render.min_valid_fraction must be in [0, 1]");
  }
  if (render.max_retries < 0) Fail("render.max_retries must be >= 0");
  if (stride < 1) Fail("pnp.stride must be >= 1");
  if (!(toy.room.width > 0 && toy.room.length > 0 && toy.room.height > 0) ||
      toy.room.num_points == 0) {
    Fail("toy room needs positive dimensions and points");
  }
  if (!(toy.corrupt_fraction >= 0.0 && toy.corrupt_fraction <= 1.0)) {
    Fail("toy.corrupt_fraction must be in [0, 1]");
  }
}

PipelineConfig ParsePipelineConfig(const std::string& toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML " << e.source().begin << ": " << e.description();
    Fail(msg.str());
  }

  PipelineConfig c;
  std::map<std::string, Setter> render = {
      {"point_size", Real(c.render.splat.point_size)},
      {"aabb_margin", Real(c.render.aabb_margin)},
      {"min_height", Real(c.render.min_height)},
      {"max_height", Real(c.render.max_height)},
      {"yaw_min_deg", Real(c.render.yaw_min_deg)},
      {"yaw_max_deg", Real(c.render.yaw_max_deg)},
      {"max_pitch_deg", Real(c.render.max_pitch_deg)},
      {"max_roll_deg", Real(c.render.max_roll_deg)},
      {"min_valid_fraction", Real(c.render.min_valid_fraction)},
      {"max_retries", Integer(c.render.max_retries)}};
  std::map<std::string, Setter> histmatch = {
      {"pooled", Boolean(c.histmatch.pooled)}};
  std::map<std::string, Setter> pnp = {
      {"inlier_threshold_px", Real(c.ransac.inlier_threshold_px)},
      {"confidence", Real(c.ransac.confidence)},
      {"max_iterations", Integer(c.ransac.max_iterations)},
      {"min_inliers", Integer(c.ransac.min_inliers)},
      {"refine_iterations", Integer(c.ransac.refine_iterations)},
      {"stride", Integer(c.stride)}};
  std::map<std::string, Setter> icp = {
      {"max_iterations", Integer(c.icp.max_iterations)},
      {"convergence_threshold", Real(c.icp.convergence_threshold)},
      {"max_correspondence_distance", Real(c.icp.max_correspondence_distance)},
      {"max_source_points", Integer(c.icp.max_source_points)}};
  std::map<std::string, Setter> toy = {
      {"width", Real(c.toy.room.width)},
      {"length", Real(c.toy.room.length)},
      {"height", Real(c.toy.room.height)},
      {"num_points", Integer(c.toy.room.num_points)},
      {"train_frames", Integer(c.toy.train_frames)},
      {"test_frames", Integer(c.toy.test_frames)},
      {"corrupt_fraction", Real(c.toy.corrupt_fraction)}};
  std::map<std::string, Setter> eval = {
      {"percentile_policy", Policy(c.percentile_policy)}};
  const std::map<std::string, std::map<std::string, Setter>*> sections = {
      {"render", &render}, {"histmatch", &histmatch}, {"pnp", &pnp},
      {"icp", &icp},       {"toy", &toy},             {"eval", &eval}};

  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (key == "seed") {
      Integer(c.seed)(node, key);
      continue;
    }
    const auto it = sections.find(key);
    if (it == sections.end()) Fail("unknown key " + key);
    const toml::table* table = node.as_table();
    if (!table) Fail(key + " must be a table");
    Apply(*table, key + ".", *it->second);
  }
  c.toy.room.seed = c.seed;
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParsePipelineConfig(text.str());
  } catch (const Error& e) {
    std::string what = e.what();
    const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
    if (what.starts_with(prefix)) what.erase(0, prefix.size());
    throw Error(ErrorCode::kConfigError, path.string() + ": " + what);
  }
}

}  // namespace scrforge
