#pragma once

#include <cstdint>
#include <string_view>

namespace throttle {

enum class Verdict { malicious, benign };

/// Lifecycle of a monitored process. Edges:
///   normal -> suspicious | terminable
///   suspicious -> normal | suspicious | terminable
///   terminable -> terminable | terminated
/// terminated is absorbing.
enum class LifecycleState { normal, suspicious, terminable, terminated };

enum class ExitReason { none, detected, completed };

std::string_view to_string(Verdict v);
std::string_view to_string(LifecycleState s);
std::string_view to_string(ExitReason r);
Verdict parse_verdict(std::string_view text);

/// max(0, min(x, 100)). Throws ValidationError for NaN or infinities.
double clamp_score(double x);

enum class AssessmentFamily { incremental, linear, exponential };

/// Growth rule shared by the penalty and compensation scores.
///
///   incremental:  x -> x + 1
///   linear:       x -> a*x + b      (a >= 1, b >= 0)
///   exponential:  x -> 2^i * x + 1  (i = current epoch)
class AssessmentPolicy {
 public:
  static AssessmentPolicy incremental();
  static AssessmentPolicy linear(double slope, double offset);
  static AssessmentPolicy exponential();

  AssessmentFamily family() const noexcept { return family_; }
  double slope() const noexcept { return slope_; }
  double offset() const noexcept { return offset_; }

  /// Unclamped growth function. May return +inf for the exponential family.
  double grow(double previous, std::uint64_t epoch) const;

  bool operator==(const AssessmentPolicy&) const = default;

 private:
  AssessmentPolicy(AssessmentFamily family, double slope, double offset)
      : family_(family), slope_(slope), offset_(offset) {}

  AssessmentFamily family_ = AssessmentFamily::incremental;
  double slope_ = 1.0;
  double offset_ = 1.0;
};

double assess_penalty(const AssessmentPolicy& policy, double previous_penalty,
                      std::uint64_t epoch);
double assess_compensation(const AssessmentPolicy& policy,
                           double previous_compensation, std::uint64_t epoch);

/// Per-process threat bookkeeping. All three scores stay in [0, 100].
struct ThreatLedger {
  double penalty = 0.0;
  double compensation = 0.0;
  double threat_index = 0.0;
  LifecycleState state = LifecycleState::normal;
  std::uint64_t epoch = 0;
  std::uint64_t measurements = 0;
  ExitReason exit_reason = ExitReason::none;

  bool operator==(const ThreatLedger&) const = default;
};

/// Everything step_epoch needs besides the ledger and the verdict.
struct ThreatRules {
  AssessmentPolicy penalty = AssessmentPolicy::incremental();
  AssessmentPolicy compensation = AssessmentPolicy::incremental();
  std::uint64_t n_star = 1;
  std::uint64_t measurements_per_epoch = 1;

  void validate() const;
};

struct StepResult {
  ThreatLedger ledger;
  double threat_delta = 0.0;
};

/// One pass of the measurement loop: advance the epoch, take the verdict,
/// update penalty/compensation/threat and the lifecycle state.
/// Requires state normal or suspicious and measurements < n_star.
StepResult step_epoch(const ThreatLedger& ledger, Verdict verdict,
                      const ThreatRules& rules);

StepResult step_epoch(const ThreatLedger& ledger, Verdict verdict,
                      const AssessmentPolicy& penalty_policy,
                      const AssessmentPolicy& compensation_policy,
                      std::uint64_t n_star,
                      std::uint64_t new_measurements = 1);

struct Resolution {
  ThreatLedger ledger;
  /// Set on a benign verdict: the caller restores default resources.
  bool reset = false;
};

/// Final verdict handling once the measurement budget is spent.
/// Malicious -> terminated; benign -> stays terminable with a reset signal.
Resolution resolve_terminable(const ThreatLedger& ledger, Verdict verdict);

/// The process finished on its own. Valid from any non-terminated state.
ThreatLedger mark_completed(const ThreatLedger& ledger);

/// True when `from -> to` is an edge of the lifecycle graph (self-loops
/// included for normal, suspicious and terminable).
bool is_allowed_transition(LifecycleState from, LifecycleState to) noexcept;

}  // namespace throttle
