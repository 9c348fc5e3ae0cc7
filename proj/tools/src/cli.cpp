#include "throttle/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "throttle/efficacy.hpp"
#include "throttle/error.hpp"
#include "throttle/host_adapter.hpp"
#include "throttle/progress.hpp"
#include "throttle/scenario_config.hpp"
#include "throttle/supervisor.hpp"

namespace throttle::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void request_stop(int) { g_stop.store(true); }

struct RunConfig {
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string trace;
};

struct PlanConfig {
  std::string curve;
  std::optional<double> f1;
  std::optional<double> fpr;
  double epoch_ms = 100.0;
  bool first_crossing = false;
};

struct SuperviseConfig {
  RunConfig run;
  bool fake_adapter = false;
  std::vector<std::uint64_t> pids;
  std::string cgroup;
  std::uint64_t memory_bytes = 0;
};

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path))
    throw ValidationError(fmt::format("cannot create output directory '{}'", dir));
  return path;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  body(out);
  out.flush();
  if (!out) throw ScenarioError(fmt::format("write to '{}' failed", path.string()));
}

void write_reports(const Scenario& scenario, const fs::path& out_dir) {
  const auto with = run_scenario(scenario);
  const auto without = run_scenario(scenario, ResponseMode::unthrottled);
  std::vector<SlowdownReport> reports;
  for (const auto& p : scenario.processes) reports.push_back(slowdown(with, without, p.id));
  std::sort(reports.begin(), reports.end(),
            [](const auto& a, const auto& b) { return a.process < b.process; });
  write_file(out_dir / "log.csv", [&](std::ostream& o) { write_log_csv(o, with); });
  write_file(out_dir / "slowdown.csv", [&](std::ostream& o) { write_slowdown_csv(o, reports); });
}

void require_trace_coverage(const Scenario& scenario) {
  if (scenario.epochs < 2) return;
  const std::uint64_t needed = scenario.epochs - 1;
  for (const auto& p : scenario.processes) {
    const auto last = p.source.last_epoch();
    if (last && *last < needed)
      throw SourceExhausted(fmt::format("trace for process '{}' ends at epoch {}, scenario needs {}",
                                        p.id, *last, needed));
  }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto scenario = load_scenario(cfg.scenario, cfg.seed);
  const auto dir = prepare_out_dir(cfg.out_dir);
  write_reports(scenario, dir);
  out << fmt::format("wrote {} and {}\n", (dir / "log.csv").string(),
                     (dir / "slowdown.csv").string());
  return kExitOk;
}

int cmd_replay(const RunConfig& cfg, std::ostream& out) {
  auto scenario = load_scenario(cfg.scenario, cfg.seed);
  use_traces(scenario, load_trace_csv(cfg.trace));
  require_trace_coverage(scenario);
  const auto dir = prepare_out_dir(cfg.out_dir);
  write_reports(scenario, dir);
  out << fmt::format("wrote {} and {}\n", (dir / "log.csv").string(),
                     (dir / "slowdown.csv").string());
  return kExitOk;
}

int cmd_plan(const PlanConfig& cfg, std::ostream& out) {
  const auto curve = load_curve_csv(cfg.curve, cfg.epoch_ms);
  EfficacyTarget target;
  if (cfg.f1) {
    target = {TargetKind::f1_at_least, *cfg.f1};
  } else {
    target = {TargetKind::fpr_at_most, *cfg.fpr};
  }
  const auto rule = cfg.first_crossing ? CrossingRule::first : CrossingRule::sustained;
  const auto n_star = required_measurements(curve, target, rule);
  out << fmt::format("{} measurements\n{}s at {} ms per epoch\n", n_star,
                     budget_to_time(n_star, curve), cfg.epoch_ms);
  return kExitOk;
}

void write_warnings_csv(std::ostream& out, const std::vector<AdapterWarning>& warnings) {
  out << "epoch,process,resource,status\n";
  for (const auto& w : warnings) {
    out << w.epoch << ',' << w.process << ',' << to_string(w.resource) << ','
        << (w.status == ApplyStatus::denied ? "denied" : "unsupported") << '\n';
  }
}

int cmd_supervise(const SuperviseConfig& cfg, std::ostream& out, std::ostream& err) {
  auto scenario = load_scenario(cfg.run.scenario, cfg.run.seed);
  if (!cfg.run.trace.empty()) {
    use_traces(scenario, load_trace_csv(cfg.run.trace));
    require_trace_coverage(scenario);
  }
  const auto dir = prepare_out_dir(cfg.run.out_dir);

  g_stop.store(false);
  auto previous_int = std::signal(SIGINT, request_stop);
  auto previous_term = std::signal(SIGTERM, request_stop);
  struct RestoreSignals {
    decltype(previous_int) i, t;
    ~RestoreSignals() {
      std::signal(SIGINT, i);
      std::signal(SIGTERM, t);
    }
  } restore{previous_int, previous_term};

  SupervisionResult result;
  if (cfg.fake_adapter) {
    FakeClock clock;
    FakeHostAdapter adapter(&clock);
    std::vector<std::uint64_t> pids;
    for (std::size_t i = 0; i < scenario.processes.size(); ++i) pids.push_back(1000 + i);
    result = supervise(scenario, adapter, pids, {&clock, &g_stop});
    write_file(dir / "adapter_log.csv", [&](std::ostream& o) { adapter.write_log_csv(o); });
  } else {
#ifdef THROTTLE_HAS_LINUX_ADAPTER
    if (cfg.pids.size() != scenario.processes.size())
      throw ValidationError(fmt::format("--pid given {} times, scenario has {} processes",
                                        cfg.pids.size(), scenario.processes.size()));
    LinuxHostAdapter::Options options;
    options.cgroup_dir = cfg.cgroup;
    options.memory_default_bytes = cfg.memory_bytes;
    LinuxHostAdapter adapter(options);
    SteadyClock clock;
    result = supervise(scenario, adapter, cfg.pids, {&clock, &g_stop});
#else
    throw ValidationError("live supervision is not available on this platform");
#endif
  }

  write_file(dir / "log.csv", [&](std::ostream& o) { write_log_csv(o, result.log); });
  write_file(dir / "warnings.csv", [&](std::ostream& o) { write_warnings_csv(o, result.warnings); });
  for (const auto& w : result.warnings) {
    err << fmt::format("warning: epoch {}: {} {} {}\n", w.epoch, w.process, to_string(w.resource),
                       w.status == ApplyStatus::denied ? "denied" : "unsupported");
  }
  if (!result.completed) err << "supervision stopped by signal\n";
  out << fmt::format("wrote {}\n", (dir / "log.csv").string());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threat-driven process throttling engine", "throttlectl"};
  app.require_subcommand(1);

  RunConfig sim_cfg;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write log.csv and slowdown.csv");
  sim->add_option("--scenario", sim_cfg.scenario, "Scenario INI file")->required();
  sim->add_option("--out", sim_cfg.out_dir, "Output directory")->required();
  sim->add_option("--seed", sim_cfg.seed, "Override the scenario seed");

  RunConfig replay_cfg;
  auto* replay = app.add_subcommand("replay", "Run a scenario with verdicts from a trace");
  replay->add_option("--trace", replay_cfg.trace, "epoch,process,verdict CSV")->required();
  replay->add_option("--scenario", replay_cfg.scenario, "Scenario INI file")->required();
  replay->add_option("--out", replay_cfg.out_dir, "Output directory")->required();
  replay->add_option("--seed", replay_cfg.seed, "Override the scenario seed");

  PlanConfig plan_cfg;
  auto* plan = app.add_subcommand("plan", "Measurement budget for a detection target");
  plan->add_option("--curve", plan_cfg.curve, "measurements,f1,fpr CSV")->required();
  auto* f1 = plan->add_option("--f1", plan_cfg.f1, "Minimum F1 score");
  auto* fpr = plan->add_option("--fpr", plan_cfg.fpr, "Maximum false positive rate");
  f1->excludes(fpr);
  fpr->excludes(f1);
  plan->add_option("--epoch-ms", plan_cfg.epoch_ms, "Epoch length in milliseconds")
      ->capture_default_str();
  plan->add_flag("--first-crossing", plan_cfg.first_crossing,
                 "Stop at the first point meeting the target");

  SuperviseConfig sup_cfg;
  auto* sup = app.add_subcommand("supervise", "Drive host processes through the response loop");
  sup->add_option("--scenario", sup_cfg.run.scenario, "Scenario INI file")->required();
  sup->add_option("--out", sup_cfg.run.out_dir, "Output directory")->required();
  sup->add_option("--seed", sup_cfg.run.seed, "Override the scenario seed");
  sup->add_option("--trace", sup_cfg.run.trace, "Replay verdicts from this trace");
  auto* fake = sup->add_flag("--fake-adapter", sup_cfg.fake_adapter, "Use the in-memory adapter");
  auto* pid = sup->add_option("--pid", sup_cfg.pids, "Host pid, one per process in id order");
  sup->add_option("--cgroup", sup_cfg.cgroup, "cgroup v2 directory holding the processes");
  sup->add_option("--memory-bytes", sup_cfg.memory_bytes,
                  "memory.max at full share; memory limits are skipped when unset");
  fake->excludes(pid);
  pid->excludes(fake);

  try {
    app.parse(argc, argv);
    if (plan->parsed() && !plan_cfg.f1 && !plan_cfg.fpr)
      throw CLI::ValidationError("plan", "one of --f1 or --fpr is required");
    if (sup->parsed() && !sup_cfg.fake_adapter && sup_cfg.pids.empty())
      throw CLI::ValidationError("supervise", "one of --fake-adapter or --pid is required");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_cfg, out);
    if (replay->parsed()) return cmd_replay(replay_cfg, out);
    if (plan->parsed()) return cmd_plan(plan_cfg, out);
    return cmd_supervise(sup_cfg, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnreachableTarget& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnreachable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace throttle::cli
