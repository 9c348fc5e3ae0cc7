#pragma once

#include <optional>

#include "throttle/actuation.hpp"
#include "throttle/threat.hpp"

namespace throttle {

/// What one epoch did to a process.
struct EpochAction {
  Verdict verdict = Verdict::benign;
  double threat_delta = 0.0;
  bool shares_changed = false;
  /// Budget spent and the final verdict was malicious.
  bool terminate = false;
  /// Budget spent and the final verdict was benign; defaults restored.
  bool reset = false;
};

/// Drives one process through the response loop: threat assessment while
/// measurements accumulate, then terminate-or-restore once the budget is spent.
class ResponseController {
 public:
  ResponseController(ThreatRules rules, ActuatorPolicy actuator);

  const ThreatLedger& ledger() const noexcept { return ledger_; }
  const ResourceShares& shares() const noexcept { return shares_; }
  bool terminated() const noexcept { return ledger_.state == LifecycleState::terminated; }

  /// Feeds the verdict for the next epoch. Throws ContractViolation once terminated.
  EpochAction advance(Verdict verdict);

  /// The process exited on its own.
  void complete();

 private:
  ThreatRules rules_;
  ActuatorPolicy actuator_;
  ThreatLedger ledger_;
  ResourceShares shares_;
};

}  // namespace throttle
