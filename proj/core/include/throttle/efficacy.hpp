#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace throttle {

struct EfficacyPoint {
  std::uint64_t measurements = 0;
  double f1 = 0.0;
  double fpr = 0.0;
};

/// Detector quality as a function of accumulated measurements.
struct EfficacyCurve {
  std::vector<EfficacyPoint> points;
  std::string detector_name;
  double epoch_duration_ms = 100.0;

  /// At least two points, strictly increasing measurement counts, metrics in [0, 1].
  void validate() const;
};

enum class TargetKind { f1_at_least, fpr_at_most };

struct EfficacyTarget {
  TargetKind kind = TargetKind::f1_at_least;
  double threshold = 0.0;

  void validate() const;
  bool satisfied_by(const EfficacyPoint& point) const;
};

enum class CrossingRule {
  /// Earliest point after which the target holds for the rest of the curve.
  sustained,
  /// Earliest point at which the target holds at all.
  first,
};

/// Smallest measurement count meeting the target under piecewise-linear
/// interpolation, rounded up. Throws UnreachableTarget when the curve never
/// gets there.
std::uint64_t required_measurements(const EfficacyCurve& curve, const EfficacyTarget& target,
                                    CrossingRule rule = CrossingRule::sustained);

/// Wall time, in seconds, needed to collect n_star measurements.
double budget_to_time(std::uint64_t n_star, const EfficacyCurve& curve);

/// Reads `measurements,f1,fpr` CSV.
EfficacyCurve read_curve_csv(std::istream& in, std::string detector_name,
                             double epoch_duration_ms = 100.0);
EfficacyCurve load_curve_csv(const std::string& path, double epoch_duration_ms = 100.0);

}  // namespace throttle
