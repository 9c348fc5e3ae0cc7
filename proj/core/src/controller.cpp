#include "throttle/controller.hpp"

#include "throttle/error.hpp"

namespace throttle {

ResponseController::ResponseController(ThreatRules rules, ActuatorPolicy actuator)
    : rules_(std::move(rules)), actuator_(std::move(actuator)) {
  rules_.validate();
}

EpochAction ResponseController::advance(Verdict verdict) {
  EpochAction action;
  action.verdict = verdict;

  if (ledger_.state == LifecycleState::terminated)
    throw ContractViolation("advance: process already terminated");

  if (ledger_.state == LifecycleState::terminable) {
    const auto resolution = resolve_terminable(ledger_, verdict);
    ledger_ = resolution.ledger;
    if (resolution.reset) {
      const auto restored = actuate_reset(shares_, actuator_);
      action.reset = true;
      action.shares_changed = restored != shares_;
      shares_ = restored;
    } else {
      action.terminate = true;
    }
    return action;
  }

  const auto step = step_epoch(ledger_, verdict, rules_);
  const auto next_shares = actuate(shares_, step.threat_delta, actuator_);
  action.threat_delta = step.threat_delta;
  action.shares_changed = next_shares != shares_;
  ledger_ = step.ledger;
  shares_ = next_shares;
  return action;
}

void ResponseController::complete() { ledger_ = mark_completed(ledger_); }

}  // namespace throttle
