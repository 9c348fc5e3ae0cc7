#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "throttle/actuation.hpp"
#include "throttle/detectors.hpp"
#include "throttle/threat.hpp"

namespace throttle {

/// Maps a resource share to a progress multiplier in [0, 1]; share 1 -> 1.
class ResponseCurve {
 public:
  enum class Kind { proportional, linear_saturating, cliff };

  static ResponseCurve proportional();
  /// Unaffected until the share drops below `cap_fraction`, then linear.
  static ResponseCurve linear_saturating(double cap_fraction);
  /// Full speed at or above `threshold_fraction`, `collapsed_multiplier` below it.
  static ResponseCurve cliff(double threshold_fraction, double collapsed_multiplier);

  Kind kind() const noexcept { return kind_; }
  double cap_fraction() const noexcept { return a_; }
  double threshold_fraction() const noexcept { return a_; }
  double collapsed_multiplier() const noexcept { return b_; }

  double multiplier(double share) const;

  bool operator==(const ResponseCurve&) const = default;

 private:
  ResponseCurve(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

enum class Combiner { bottleneck_min, product };

/// Work done per epoch as a function of the shares a process gets.
/// Resources without a response curve do not limit progress.
struct ProgressModel {
  double base_rate = 1.0;
  std::string unit_label = "abstract";
  std::array<std::optional<ResponseCurve>, 4> response{};
  Combiner combiner = Combiner::bottleneck_min;

  ProgressModel& respond(Resource r, ResponseCurve curve) {
    response[static_cast<std::size_t>(r)] = curve;
    return *this;
  }
  const std::optional<ResponseCurve>& response_for(Resource r) const {
    return response[static_cast<std::size_t>(r)];
  }

  void validate() const;
};

double progress_rate(const ProgressModel& model, const ResourceShares& shares);

struct SimulatedProcess {
  std::string id;
  ProgressModel model;
  VerdictSource source;
  /// Natural exit after this many epochs of work, if set.
  std::optional<std::uint64_t> completes_after;
};

struct Scenario {
  std::vector<SimulatedProcess> processes;
  ThreatRules rules;
  ActuatorPolicy actuator{0.1, ActuationMode::additive, {Resource::cpu}};
  std::uint64_t epochs = 1;
  double epoch_duration_ms = 100.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::uint64_t epoch = 0;
  std::string process;
  /// Empty for epoch 0, which runs before the first inference.
  std::optional<Verdict> verdict;
  double penalty = 0.0;
  double compensation = 0.0;
  double threat_index = 0.0;
  LifecycleState state = LifecycleState::normal;
  ResourceShares shares;
  double progress = 0.0;
  double cumulative = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

/// Records ordered by epoch, then process id.
struct ScenarioLog {
  std::uint64_t epochs = 0;
  double epoch_duration_ms = 100.0;
  std::vector<EpochRecord> records;

  double total_progress(const std::string& process) const;
  bool covers(const std::string& process) const;
};

enum class ResponseMode {
  /// Full response loop: assess, throttle, terminate.
  throttled,
  /// Baseline: no assessment, every process keeps default shares.
  unthrottled,
};

ScenarioLog run_scenario(const Scenario& scenario,
                         ResponseMode mode = ResponseMode::throttled);

struct SlowdownReport {
  std::string process;
  double progress_with = 0.0;
  double progress_without = 0.0;
  double slowdown_pct = 0.0;
};

/// Percentage of progress lost to throttling: (1 - with / without) * 100.
SlowdownReport slowdown(const ScenarioLog& with_log, const ScenarioLog& without_log,
                        const std::string& process);

void write_log_csv(std::ostream& out, const ScenarioLog& log);
void write_slowdown_csv(std::ostream& out, const std::vector<SlowdownReport>& reports);

inline constexpr std::string_view kLogHeader =
    "epoch,process,verdict,penalty,compensation,threat,state,cpu,mem,net,fs,progress,"
    "cumulative";
inline constexpr std::string_view kSlowdownHeader =
    "process,progress_with,progress_without,slowdown_pct";

}  // namespace throttle
