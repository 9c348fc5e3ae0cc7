#include "throttle/efficacy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>

#include "throttle/csv.hpp"
#include "throttle/error.hpp"

namespace throttle {

namespace {

constexpr double kRoundingSlack = 1e-9;

double metric(const EfficacyPoint& p, TargetKind kind) {
  return kind == TargetKind::f1_at_least ? p.f1 : p.fpr;
}

std::string_view metric_name(TargetKind kind) {
  return kind == TargetKind::f1_at_least ? "F1" : "FPR";
}

std::string_view target_name(TargetKind kind) {
  return kind == TargetKind::f1_at_least ? "F1 >=" : "FPR <=";
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

// Measurement count where the segment a->b reaches the threshold, rounded up.
std::uint64_t crossing(const EfficacyPoint& a, const EfficacyPoint& b,
                       const EfficacyTarget& target) {
  const double ma = metric(a, target.kind);
  const double mb = metric(b, target.kind);
  const double span = static_cast<double>(b.measurements - a.measurements);
  const double at = static_cast<double>(a.measurements) +
                    (target.threshold - ma) / (mb - ma) * span;
  auto rounded = static_cast<std::uint64_t>(std::ceil(at - kRoundingSlack));
  return std::clamp(rounded, a.measurements + 1, b.measurements);
}

}  // namespace

void EfficacyCurve::validate() const {
  if (points.size() < 2) throw ValidationError("efficacy curve needs at least 2 points");
  if (!(epoch_duration_ms > 0.0) || !std::isfinite(epoch_duration_ms))
    throw ValidationError("efficacy curve: epoch duration must be positive");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.measurements == 0)
      throw ValidationError("efficacy curve: measurement counts must be positive");
    if (!in_unit_interval(p.f1) || !in_unit_interval(p.fpr))
      throw ValidationError(
          fmt::format("efficacy curve: point {} has a metric outside [0, 1]", i));
    if (i > 0 && p.measurements <= points[i - 1].measurements)
      throw ValidationError("efficacy curve: measurements must be strictly increasing");
  }
}

void EfficacyTarget::validate() const {
  if (!in_unit_interval(threshold))
    throw ValidationError("efficacy target: threshold must lie in [0, 1]");
}

bool EfficacyTarget::satisfied_by(const EfficacyPoint& point) const {
  return kind == TargetKind::f1_at_least ? point.f1 >= threshold : point.fpr <= threshold;
}

std::uint64_t required_measurements(const EfficacyCurve& curve, const EfficacyTarget& target,
                                    CrossingRule rule) {
  curve.validate();
  target.validate();
  const auto& pts = curve.points;
  const std::size_t n = pts.size();

  if (!target.satisfied_by(pts.back()) && rule == CrossingRule::sustained)
    throw UnreachableTarget(fmt::format("{} {}: curve ends at {} measurements with {} = {}",
                                        target_name(target.kind), target.threshold,
                                        pts.back().measurements, metric_name(target.kind),
                                        metric(pts.back(), target.kind)));

  // Index of the first point from which the target holds (per rule).
  std::size_t hit = n;
  if (rule == CrossingRule::sustained) {
    hit = n - 1;
    while (hit > 0 && target.satisfied_by(pts[hit - 1])) --hit;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (target.satisfied_by(pts[i])) {
        hit = i;
        break;
      }
    }
    if (hit == n)
      throw UnreachableTarget(fmt::format("{} {}: no point on the curve meets it",
                                          target_name(target.kind), target.threshold));
  }

  if (hit == 0) return pts.front().measurements;
  return crossing(pts[hit - 1], pts[hit], target);
}

double budget_to_time(std::uint64_t n_star, const EfficacyCurve& curve) {
  if (n_star == 0) throw ValidationError("budget_to_time: n_star must be >= 1");
  if (!(curve.epoch_duration_ms > 0.0))
    throw ValidationError("budget_to_time: epoch duration must be positive");
  return static_cast<double>(n_star) * curve.epoch_duration_ms / 1000.0;
}

namespace {

EfficacyCurve curve_from_table(const csv::Table& table, std::string detector_name,
                               double epoch_duration_ms) {
  EfficacyCurve curve;
  curve.detector_name = std::move(detector_name);
  curve.epoch_duration_ms = epoch_duration_ms;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto line = table.lines[i];
    curve.points.push_back({csv::to_u64(row[0], line), csv::to_double(row[1], line),
                            csv::to_double(row[2], line)});
  }
  curve.validate();
  return curve;
}

constexpr std::string_view kCurveHeader = "measurements,f1,fpr";

}  // namespace

EfficacyCurve read_curve_csv(std::istream& in, std::string detector_name,
                             double epoch_duration_ms) {
  return curve_from_table(csv::read(in, kCurveHeader), std::move(detector_name),
                          epoch_duration_ms);
}

EfficacyCurve load_curve_csv(const std::string& path, double epoch_duration_ms) {
  return curve_from_table(csv::read_file(path, kCurveHeader),
                          std::filesystem::path(path).stem().string(), epoch_duration_ms);
}

}  // namespace throttle
