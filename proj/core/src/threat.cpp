#include "throttle/threat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "throttle/error.hpp"

namespace throttle {

std::string_view to_string(Verdict v) {
  return v == Verdict::malicious ? "malicious" : "benign";
}

std::string_view to_string(LifecycleState s) {
  switch (s) {
    case LifecycleState::normal: return "normal";
    case LifecycleState::suspicious: return "suspicious";
    case LifecycleState::terminable: return "terminable";
    case LifecycleState::terminated: return "terminated";
  }
  return "unknown";
}

std::string_view to_string(ExitReason r) {
  switch (r) {
    case ExitReason::none: return "none";
    case ExitReason::detected: return "detected";
    case ExitReason::completed: return "completed";
  }
  return "unknown";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "malicious") return Verdict::malicious;
  if (text == "benign") return Verdict::benign;
  throw ParseError("unknown verdict '" + std::string(text) + "'");
}

double clamp_score(double x) {
  if (!std::isfinite(x)) throw ValidationError("clamp: non-finite score");
  return std::max(0.0, std::min(x, 100.0));
}

AssessmentPolicy AssessmentPolicy::incremental() {
  return {AssessmentFamily::incremental, 1.0, 1.0};
}

AssessmentPolicy AssessmentPolicy::linear(double slope, double offset) {
  if (!std::isfinite(slope) || !std::isfinite(offset))
    throw ValidationError("linear policy: constants must be finite");
  if (slope < 1.0) throw ValidationError("linear policy: slope a must be >= 1");
  if (offset < 0.0) throw ValidationError("linear policy: offset b must be >= 0");
  return {AssessmentFamily::linear, slope, offset};
}

AssessmentPolicy AssessmentPolicy::exponential() {
  return {AssessmentFamily::exponential, 2.0, 1.0};
}

double AssessmentPolicy::grow(double previous, std::uint64_t epoch) const {
  switch (family_) {
    case AssessmentFamily::incremental:
      return previous + 1.0;
    case AssessmentFamily::linear:
      return slope_ * previous + offset_;
    case AssessmentFamily::exponential: {
      // ldexp saturates to +inf well before the exponent overflows an int.
      const int exponent = static_cast<int>(std::min<std::uint64_t>(epoch, 4096));
      return std::ldexp(previous, exponent) + 1.0;
    }
  }
  return previous;
}

namespace {

double assess(const AssessmentPolicy& policy, double previous, std::uint64_t epoch) {
  if (!(previous >= 0.0 && previous <= 100.0))
    throw ValidationError("assessment: previous score outside [0, 100]");
  const double grown = policy.grow(previous, epoch);
  return grown == std::numeric_limits<double>::infinity() ? 100.0 : clamp_score(grown);
}

void require_stepable(const ThreatLedger& ledger, std::uint64_t n_star) {
  if (ledger.state == LifecycleState::terminable ||
      ledger.state == LifecycleState::terminated)
    throw ContractViolation("step_epoch: ledger is " +
                            std::string(to_string(ledger.state)));
  if (ledger.measurements >= n_star)
    throw ContractViolation("step_epoch: measurement budget already spent");
}

}  // namespace

double assess_penalty(const AssessmentPolicy& policy, double previous_penalty,
                      std::uint64_t epoch) {
  return assess(policy, previous_penalty, epoch);
}

double assess_compensation(const AssessmentPolicy& policy,
                           double previous_compensation, std::uint64_t epoch) {
  return assess(policy, previous_compensation, epoch);
}

void ThreatRules::validate() const {
  if (n_star == 0) throw ValidationError("n_star must be >= 1");
  if (measurements_per_epoch == 0)
    throw ValidationError("measurements_per_epoch must be >= 1");
}

StepResult step_epoch(const ThreatLedger& ledger, Verdict verdict,
                      const ThreatRules& rules) {
  return step_epoch(ledger, verdict, rules.penalty, rules.compensation,
                    rules.n_star, rules.measurements_per_epoch);
}

StepResult step_epoch(const ThreatLedger& ledger, Verdict verdict,
                      const AssessmentPolicy& penalty_policy,
                      const AssessmentPolicy& compensation_policy,
                      std::uint64_t n_star, std::uint64_t new_measurements) {
  require_stepable(ledger, n_star);

  ThreatLedger next = ledger;
  next.epoch += 1;
  next.measurements += new_measurements;

  if (verdict == Verdict::malicious) {
    next.state = LifecycleState::suspicious;
    next.penalty = assess_penalty(penalty_policy, ledger.penalty, next.epoch);
    next.threat_index = clamp_score(ledger.threat_index + next.penalty);
  } else if (ledger.state == LifecycleState::suspicious) {
    next.compensation =
        assess_compensation(compensation_policy, ledger.compensation, next.epoch);
    next.threat_index = clamp_score(ledger.threat_index - next.compensation);
  }

  if (next.threat_index == 0.0) next.state = LifecycleState::normal;
  if (next.measurements >= n_star) next.state = LifecycleState::terminable;

  return {next, next.threat_index - ledger.threat_index};
}

Resolution resolve_terminable(const ThreatLedger& ledger, Verdict verdict) {
  if (ledger.state != LifecycleState::terminable)
    throw ContractViolation("resolve_terminable: ledger is " +
                            std::string(to_string(ledger.state)));
  Resolution out{ledger, false};
  out.ledger.epoch += 1;
  if (verdict == Verdict::malicious) {
    out.ledger.state = LifecycleState::terminated;
    out.ledger.exit_reason = ExitReason::detected;
  } else {
    out.reset = true;
  }
  return out;
}

ThreatLedger mark_completed(const ThreatLedger& ledger) {
  if (ledger.state == LifecycleState::terminated)
    throw ContractViolation("mark_completed: ledger already terminated");
  ThreatLedger out = ledger;
  out.state = LifecycleState::terminated;
  out.exit_reason = ExitReason::completed;
  return out;
}

bool is_allowed_transition(LifecycleState from, LifecycleState to) noexcept {
  using S = LifecycleState;
  switch (from) {
    case S::normal:
    case S::suspicious:
      return to != S::terminated;
    case S::terminable:
      return to == S::terminable || to == S::terminated;
    case S::terminated:
      return to == S::terminated;
  }
  return false;
}

}  // namespace throttle
