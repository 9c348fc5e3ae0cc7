#include "throttle/progress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "throttle/controller.hpp"
#include "throttle/csv.hpp"
#include "throttle/error.hpp"

namespace throttle {

ResponseCurve ResponseCurve::proportional() { return {Kind::proportional, 1.0, 0.0}; }

ResponseCurve ResponseCurve::linear_saturating(double cap_fraction) {
  if (!(cap_fraction > 0.0 && cap_fraction <= 1.0))
    throw ValidationError("linear_saturating: cap fraction must lie in (0, 1]");
  return {Kind::linear_saturating, cap_fraction, 0.0};
}

ResponseCurve ResponseCurve::cliff(double threshold_fraction, double collapsed_multiplier) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
    throw ValidationError("cliff: threshold must lie in (0, 1]");
  if (!(collapsed_multiplier >= 0.0 && collapsed_multiplier <= 1.0))
    throw ValidationError("cliff: collapsed multiplier must lie in [0, 1]");
  return {Kind::cliff, threshold_fraction, collapsed_multiplier};
}

double ResponseCurve::multiplier(double share) const {
  switch (kind_) {
    case Kind::proportional:
      return share;
    case Kind::linear_saturating:
      return std::min(1.0, share / a_);
    case Kind::cliff:
      return share >= a_ ? 1.0 : b_;
  }
  return 1.0;
}

void ProgressModel::validate() const {
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate))
    throw ValidationError("progress model: base rate must be finite and non-negative");
}

double progress_rate(const ProgressModel& model, const ResourceShares& shares) {
  double combined = 1.0;
  for (Resource r : kAllResources) {
    const auto& curve = model.response_for(r);
    if (!curve) continue;
    const double m = curve->multiplier(shares[r]);
    combined = model.combiner == Combiner::bottleneck_min ? std::min(combined, m)
                                                          : combined * m;
  }
  return model.base_rate * combined;
}

void Scenario::validate() const {
  rules.validate();
  if (epochs == 0) throw ValidationError("scenario: epochs must be >= 1");
  if (!(epoch_duration_ms > 0.0)) throw ValidationError("scenario: epoch duration must be positive");
  if (processes.empty()) throw ValidationError("scenario: no processes");
  std::set<std::string> ids;
  for (const auto& p : processes) {
    if (p.id.empty()) throw ValidationError("scenario: empty process id");
    if (!ids.insert(p.id).second)
      throw ValidationError("scenario: duplicate process id '" + p.id + "'");
    p.model.validate();
  }
}

double ScenarioLog::total_progress(const std::string& process) const {
  double total = 0.0;
  for (const auto& r : records)
    if (r.process == process) total += r.progress;
  return total;
}

bool ScenarioLog::covers(const std::string& process) const {
  return std::any_of(records.begin(), records.end(),
                     [&](const EpochRecord& r) { return r.process == process; });
}

ScenarioLog run_scenario(const Scenario& scenario, ResponseMode mode) {
  scenario.validate();
  const auto& procs = scenario.processes;

  std::vector<std::size_t> order(procs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return procs[a].id < procs[b].id; });

  std::vector<ResponseController> controllers;
  controllers.reserve(procs.size());
  for (std::size_t i = 0; i < procs.size(); ++i)
    controllers.emplace_back(scenario.rules, scenario.actuator);
  std::vector<double> cumulative(procs.size(), 0.0);
  std::vector<bool> finished(procs.size(), false);

  ScenarioLog log;
  log.epochs = scenario.epochs;
  log.epoch_duration_ms = scenario.epoch_duration_ms;
  log.records.reserve(procs.size() * scenario.epochs);

  for (std::uint64_t epoch = 0; epoch < scenario.epochs; ++epoch) {
    for (std::size_t idx : order) {
      if (finished[idx]) continue;
      const auto& proc = procs[idx];
      auto& ctl = controllers[idx];

      EpochRecord rec;
      rec.epoch = epoch;
      rec.process = proc.id;

      if (proc.completes_after && epoch >= *proc.completes_after) {
        ctl.complete();
      } else if (mode == ResponseMode::throttled && epoch > 0) {
        Verdict verdict;
        try {
          verdict = proc.source.next_verdict(epoch);
        } catch (const SourceExhausted& e) {
          throw SourceExhausted(fmt::format("process '{}': {}", proc.id, e.what()));
        }
        ctl.advance(verdict);
        rec.verdict = verdict;
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
      log.records.push_back(std::move(rec));
    }
  }
  return log;
}

SlowdownReport slowdown(const ScenarioLog& with_log, const ScenarioLog& without_log,
                        const std::string& process) {
  if (with_log.epochs != without_log.epochs)
    throw ScenarioError(fmt::format("slowdown: logs cover {} and {} epochs", with_log.epochs,
                                    without_log.epochs));
  if (!with_log.covers(process) || !without_log.covers(process))
    throw ScenarioError("slowdown: process '" + process + "' missing from a log");

  SlowdownReport report;
  report.process = process;
  report.progress_with = with_log.total_progress(process);
  report.progress_without = without_log.total_progress(process);
  if (!(report.progress_without > 0.0))
    throw ScenarioError("slowdown: baseline progress for '" + process + "' is zero");
  if (report.progress_with > report.progress_without * (1.0 + 1e-9))
    throw ScenarioError("slowdown: throttled run progressed further than the baseline");

  const double pct = (1.0 - report.progress_with / report.progress_without) * 100.0;
  report.slowdown_pct = std::clamp(pct, 0.0, 100.0);
  return report;
}

void write_log_csv(std::ostream& out, const ScenarioLog& log) {
  using csv::fixed6;
  out << kLogHeader << '\n';
  for (const auto& r : log.records) {
    out << r.epoch << ',' << r.process << ','
        << (r.verdict ? to_string(*r.verdict) : std::string_view("none")) << ','
        << fixed6(r.penalty) << ',' << fixed6(r.compensation) << ','
        << fixed6(r.threat_index) << ',' << to_string(r.state) << ','
        << fixed6(r.shares.cpu()) << ',' << fixed6(r.shares.memory()) << ','
        << fixed6(r.shares.network()) << ',' << fixed6(r.shares.filesystem()) << ','
        << fixed6(r.progress) << ',' << fixed6(r.cumulative) << '\n';
  }
}

void write_slowdown_csv(std::ostream& out, const std::vector<SlowdownReport>& reports) {
  using csv::fixed6;
  out << kSlowdownHeader << '\n';
  for (const auto& r : reports) {
    out << r.process << ',' << fixed6(r.progress_with) << ',' << fixed6(r.progress_without)
        << ',' << fixed6(r.slowdown_pct) << '\n';
  }
}

}  // namespace throttle
