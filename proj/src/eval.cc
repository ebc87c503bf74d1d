#include "scrforge/eval.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "scrforge/error.h"

namespace scrforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MetricSummary Summarize(std::vector<double> values, std::size_t invalid,
                        PercentilePolicy policy) {
  MetricSummary s{kInf, kInf, kInf};
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!values.empty()) s.mean = sum / double(values.size());
  if (policy == PercentilePolicy::kPenalize) values.insert(values.end(), invalid, kInf);
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.median = Percentile(values, 0.5);
  s.p95 = Percentile(values, 0.95);
  return s;
}

nlohmann::json Number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double ReadNumber(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("report lacks ") + key);
  }
  if (j[key].is_null()) return kInf;
  if (!j[key].is_number()) {
    throw Error(ErrorCode::kParseError, std::string(key) + " is not a number");
  }
  return j[key].get<double>();
}

nlohmann::json SummaryToJson(const MetricSummary& s) {
  return {{"median", Number(s.median)},
          {"p95", Number(s.p95)},
          {"mean", Number(s.mean)}};
}

MetricSummary SummaryFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "metric not an object");
  return {ReadNumber(j, "median"), ReadNumber(j, "p95"), ReadNumber(j, "mean")};
}

std::string Cell(double rot, double trans) {
  if (!std::isfinite(rot) || !std::isfinite(trans)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f°, %.3f m", rot, trans);
  return buf;
}

}  // namespace

PoseError ComputePoseError(const RigidTransform& gt, const RigidTransform& est) {
  return {RotationAngleDeg(gt.rotation(), est.rotation()),
          (gt.Center() - est.Center()).norm(), true};
}

PoseError ComputePoseError(const RigidTransform& gt, const PoseEstimate& est) {
  PoseError e = ComputePoseError(gt, est.pose);
  e.valid = est.valid;
  return e;
}

PercentilePolicy ParsePercentilePolicy(const std::string& name) {
  if (name == "exclude") return PercentilePolicy::kExclude;
  if (name == "penalize") return PercentilePolicy::kPenalize;
  throw Error(ErrorCode::kInvalidArgument,
              "percentile policy must be exclude or penalize, got " + name);
}

std::string PercentilePolicyName(PercentilePolicy policy) {
  return policy == PercentilePolicy::kPenalize ? "penalize" : "exclude";
}

double Percentile(std::span<const double> sorted, double p) {
  const double rank = p * double(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - double(lo);
  if (frac == 0.0 || sorted[hi] == sorted[lo]) return sorted[lo];
  if (std::isinf(sorted[hi])) return sorted[hi];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EvalReport Aggregate(std::span<const PoseError> errors,
                     PercentilePolicy policy) {
  if (errors.empty()) {
    throw Error(ErrorCode::kEmptyList, "no pose errors to aggregate");
  }
  std::vector<double> rot, trans;
  for (const PoseError& e : errors) {
    if (!e.valid) continue;
    rot.push_back(e.rotation_deg);
    trans.push_back(e.translation_m);
  }
  EvalReport r;
  r.frame_count = errors.size();
  r.valid_count = rot.size();
  r.policy = policy;
  const std::size_t invalid = r.frame_count - r.valid_count;
  r.invalid_fraction = double(invalid) / double(r.frame_count);
  r.rotation_deg = Summarize(std::move(rot), invalid, policy);
  r.translation_m = Summarize(std::move(trans), invalid, policy);
  return r;
}

nlohmann::json ReportToJson(const EvalReport& report) {
  return {{"rotation_deg", SummaryToJson(report.rotation_deg)},
          {"translation_m", SummaryToJson(report.translation_m)},
          {"invalid_fraction", report.invalid_fraction},
          {"frame_count", report.frame_count},
          {"valid_count", report.valid_count},
          {"policy", PercentilePolicyName(report.policy)}};
}

EvalReport ReportFromJson(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.rotation_deg = SummaryFromJson(j.at("rotation_deg"));
    r.translation_m = SummaryFromJson(j.at("translation_m"));
    r.invalid_fraction = j.at("invalid_fraction").get<double>();
    r.frame_count = j.at("frame_count").get<std::size_t>();
    r.valid_count = j.at("valid_count").get<std::size_t>();
    r.policy = ParsePercentilePolicy(j.at("policy").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string ReportTable(
    std::span<const std::pair<std::string, EvalReport>> rows) {
  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"Method", "Median error", "95%-tile error", "Invalid"});
  for (const auto& [name, r] : rows) {
    char invalid[32];
    std::snprintf(invalid, sizeof(invalid), "%.1f%%", 100.0 * r.invalid_fraction);
    cells.push_back({name, Cell(r.rotation_deg.median, r.translation_m.median),
                     Cell(r.rotation_deg.p95, r.translation_m.p95), invalid});
  }
  // Pad by code points so the degree sign does not skew the columns.
  auto width = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char ch : s) n += (ch & 0xC0) != 0x80;
    return n;
  };
  std::array<std::size_t, 4> w{};
  for (const auto& row : cells) {
    for (int c = 0; c < 4; ++c) w[c] = std::max(w[c], width(row[c]));
  }
  std::string out;
  auto emit = [&](const std::array<std::string, 4>& row) {
    out += "|";
    for (int c = 0; c < 4; ++c) {
      out += " " + row[c] + std::string(w[c] - width(row[c]), ' ') + " |";
    }
    out += "\n";
  };
  emit(cells[0]);
  out += "|";
  for (int c = 0; c < 4; ++c) out += std::string(w[c] + 2, '-') + "|";
  out += "\n";
  for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
  return out;
}

}  // namespace scrforge
