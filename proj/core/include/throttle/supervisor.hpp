#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "throttle/controller.hpp"
#include "throttle/host_adapter.hpp"
#include "throttle/progress.hpp"

namespace throttle {

struct AdapterWarning {
  std::uint64_t epoch = 0;
  std::string process;
  Resource resource = Resource::cpu;
  ApplyStatus status = ApplyStatus::unsupported;
};

struct SupervisionResult {
  ScenarioLog log;
  std::vector<AdapterWarning> warnings;
  /// False when a stop request ended the loop early.
  bool completed = true;
};

struct SupervisionOptions {
  /// Sleeps one epoch between iterations when set.
  Clock* clock = nullptr;
  /// Checked before every epoch.
  const std::atomic<bool>* stop = nullptr;
};

/// Runs the response loop against live (or fake) host processes: one verdict
/// per epoch, apply_shares only on epochs that change shares, terminate once
/// the budget is spent and the verdict is malicious. `host_pids[i]` is the
/// host process for `scenario.processes[i]`.
SupervisionResult supervise(const Scenario& scenario, HostAdapter& adapter,
                            const std::vector<std::uint64_t>& host_pids,
                            const SupervisionOptions& options = {});

}  // namespace throttle
