#include "throttle/supervisor.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "throttle/error.hpp"

namespace throttle {

SupervisionResult supervise(const Scenario& scenario, HostAdapter& adapter,
                            const std::vector<std::uint64_t>& host_pids,
                            const SupervisionOptions& options) {
  scenario.validate();
  const auto& procs = scenario.processes;
  if (host_pids.size() != procs.size())
    throw ValidationError(fmt::format("supervise: {} processes but {} host pids",
                                      procs.size(), host_pids.size()));

  std::vector<std::size_t> order(procs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return procs[a].id < procs[b].id; });

  std::vector<ProcessHandle> handles(procs.size());
  std::vector<ResponseController> controllers;
  controllers.reserve(procs.size());
  for (std::size_t idx : order) handles[idx] = adapter.attach(host_pids[idx]);
  for (std::size_t i = 0; i < procs.size(); ++i)
    controllers.emplace_back(scenario.rules, scenario.actuator);

  SupervisionResult result;
  result.log.epochs = scenario.epochs;
  result.log.epoch_duration_ms = scenario.epoch_duration_ms;
  std::vector<double> cumulative(procs.size(), 0.0);
  std::vector<bool> finished(procs.size(), false);

  for (std::uint64_t epoch = 0; epoch < scenario.epochs; ++epoch) {
    if (options.stop && options.stop->load()) {
      result.completed = false;
      break;
    }
    if (epoch > 0 && options.clock) options.clock->sleep_for_ms(scenario.epoch_duration_ms);

    for (std::size_t idx : order) {
      if (finished[idx]) continue;
      const auto& proc = procs[idx];
      auto& ctl = controllers[idx];
      EpochRecord rec;
      rec.epoch = epoch;
      rec.process = proc.id;

      if (epoch > 0) {
        const Verdict verdict = proc.source.next_verdict(epoch);
        rec.verdict = verdict;
        const auto action = ctl.advance(verdict);
        try {
          if (action.terminate) {
            adapter.terminate(handles[idx]);
          } else if (action.shares_changed) {
            const auto ack = adapter.apply_shares(handles[idx], ctl.shares());
            for (Resource r : kAllResources) {
              const auto st = ack[r];
              if (st == ApplyStatus::unsupported || st == ApplyStatus::denied)
                result.warnings.push_back({epoch, proc.id, r, st});
            }
          }
        } catch (const StaleHandle&) {
          // Exited on its own between epochs.
          if (!ctl.terminated()) ctl.complete();
        }
      }

      const auto& ledger = ctl.ledger();
      rec.penalty = ledger.penalty;
      rec.compensation = ledger.compensation;
      rec.threat_index = ledger.threat_index;
      rec.state = ledger.state;
      rec.shares = ctl.shares();
      rec.progress = ctl.terminated() ? 0.0 : progress_rate(proc.model, ctl.shares());
      cumulative[idx] += rec.progress;
      rec.cumulative = cumulative[idx];
      finished[idx] = ctl.terminated();
      result.log.records.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace throttle
