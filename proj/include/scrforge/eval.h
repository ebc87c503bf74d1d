#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "scrforge/geometry.h"
#include "scrforge/pnp_ransac.h"

namespace scrforge {

struct PoseError {
  double rotation_deg = 0.0;
  double translation_m = 0.0;  // camera-center distance
  bool valid = true;
};

PoseError ComputePoseError(const RigidTransform& gt, const RigidTransform& est);
// Invalid estimates give valid = false.
PoseError ComputePoseError(const RigidTransform& gt, const PoseEstimate& est);

// How invalid entries enter the percentiles. kExclude drops them; kPenalize
// treats their errors as +inf, so enough of them saturate the percentiles.
// Means are always taken over valid entries.
enum class PercentilePolicy { kExclude, kPenalize };

// Throws InvalidArgument for names other than "exclude" and "penalize".
PercentilePolicy ParsePercentilePolicy(const std::string& name);
std::string PercentilePolicyName(PercentilePolicy policy);

struct MetricSummary {
  double median = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
  bool operator==(const MetricSummary&) const = default;
};

// Statistics with nothing to summarize are +inf.
struct EvalReport {
  MetricSummary rotation_deg;
  MetricSummary translation_m;
  double invalid_fraction = 0.0;
  std::size_t frame_count = 0;
  std::size_t valid_count = 0;
  PercentilePolicy policy = PercentilePolicy::kExclude;
  bool operator==(const EvalReport&) const = default;
};

// Linear interpolation between order statistics at rank p * (n - 1).
// `sorted` must be ascending and non-empty.
double Percentile(std::span<const double> sorted, double p);

// Throws EmptyList.
EvalReport Aggregate(std::span<const PoseError> errors,
                     PercentilePolicy policy = PercentilePolicy::kExclude);

// Infinite values are written as null and read back as +inf.
nlohmann::json ReportToJson(const EvalReport& report);
// Throws ParseError.
EvalReport ReportFromJson(const nlohmann::json& j);

// Markdown table with columns method / median error / 95%-tile error /
// invalid, one row per (method, report).
std::string ReportTable(
    std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace scrforge
