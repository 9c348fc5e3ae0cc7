#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "throttle/actuation.hpp"

namespace throttle {

struct ProcessHandle {
  std::uint64_t id = 0;
  /// Limits in force when the process was attached; shares scale these.
  ResourceShares default_shares;
};

enum class ApplyStatus { applied, unchanged, unsupported, denied };

std::string_view to_string(ApplyStatus s);

struct ApplyAck {
  std::array<ApplyStatus, 4> status{ApplyStatus::applied, ApplyStatus::applied,
                                    ApplyStatus::applied, ApplyStatus::applied};
  /// The call repeated the limits already in force.
  bool deduplicated = false;

  ApplyStatus operator[](Resource r) const { return status[static_cast<std::size_t>(r)]; }
  bool fully_applied() const;
};

struct Ack {
  /// Nothing to do (already exited, already paused, not paused).
  bool noop = false;
};

/// Applies resource shares to live host processes. Calls for one handle
/// must be serialized by the caller.
class HostAdapter {
 public:
  virtual ~HostAdapter() = default;

  virtual ProcessHandle attach(std::uint64_t host_pid) = 0;
  /// Throws StaleHandle if the process is gone. Resources the host cannot
  /// limit are reported per resource; the rest are still applied.
  virtual ApplyAck apply_shares(const ProcessHandle& handle, const ResourceShares& shares) = 0;
  virtual Ack terminate(const ProcessHandle& handle) = 0;
  virtual Ack pause(const ProcessHandle& handle) = 0;
  virtual Ack resume(const ProcessHandle& handle) = 0;
};

/// Time source for duty cycling and the fake adapter's accounting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_ms() const = 0;
  virtual void sleep_for_ms(double ms) = 0;
};

class SteadyClock final : public Clock {
 public:
  double now_ms() const override;
  void sleep_for_ms(double ms) override;
};

/// Manually advanced clock; sleeping just moves time forward.
class FakeClock final : public Clock {
 public:
  double now_ms() const override { return now_; }
  void sleep_for_ms(double ms) override { now_ += ms; }
  void advance(double ms) { now_ += ms; }

 private:
  double now_ = 0.0;
};

struct AdapterCall {
  std::uint64_t seq = 0;
  std::uint64_t handle = 0;
  std::string call;
  std::string args;
};

/// Scripted in-memory host. Every call is appended to a log that tests
/// assert against; it never kills a process on its own.
class FakeHostAdapter final : public HostAdapter {
 public:
  explicit FakeHostAdapter(const Clock* clock = nullptr) : clock_(clock) {}

  ProcessHandle attach(std::uint64_t host_pid) override;
  ApplyAck apply_shares(const ProcessHandle& handle, const ResourceShares& shares) override;
  Ack terminate(const ProcessHandle& handle) override;
  Ack pause(const ProcessHandle& handle) override;
  Ack resume(const ProcessHandle& handle) override;

  /// Script: the process exits by itself.
  void exit_process(const ProcessHandle& handle);
  /// Script: this host cannot limit `r`.
  void set_unsupported(Resource r, bool unsupported = true);
  /// Script: limiting `r` fails for lack of privilege.
  void set_denied(Resource r, bool denied = true);

  ResourceShares limits(const ProcessHandle& handle) const;
  bool running(const ProcessHandle& handle) const;
  bool paused(const ProcessHandle& handle) const;
  bool alive(const ProcessHandle& handle) const;
  /// Milliseconds spent running (attached, not paused) according to the clock.
  double running_ms(const ProcessHandle& handle) const;

  std::vector<AdapterCall> calls() const;
  std::size_t count(std::string_view call) const;
  void write_log_csv(std::ostream& out) const;

 private:
  struct FakeProcess {
    std::uint64_t host_pid = 0;
    ResourceShares limits;
    bool alive = true;
    bool paused = false;
    double running_ms = 0.0;
    double last_change_ms = 0.0;
  };

  double now() const { return clock_ ? clock_->now_ms() : 0.0; }
  FakeProcess& live(const ProcessHandle& handle);
  const FakeProcess& find(const ProcessHandle& handle) const;
  void record(std::uint64_t handle, std::string call, std::string args);
  void settle(FakeProcess& p);

  const Clock* clock_;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, FakeProcess> processes_;
  std::vector<AdapterCall> log_;
  std::array<bool, 4> unsupported_{};
  std::array<bool, 4> denied_{};
  std::uint64_t next_handle_ = 1;
};

/// Limits a resource by alternating resume and pause within each period,
/// the way cpulimit-style tools cap CPU or file-access rate.
class DutyCycleThrottler {
 public:
  DutyCycleThrottler(HostAdapter& adapter, ProcessHandle handle, Clock& clock,
                     double period_ms = 100.0);

  /// Runs for share * period, then stays paused for the rest of the period.
  void run_period(double share);

 private:
  HostAdapter& adapter_;
  ProcessHandle handle_;
  Clock& clock_;
  double period_ms_;
};

#ifdef THROTTLE_HAS_LINUX_ADAPTER
/// Signals for pause/resume/terminate; CPU and memory limits through a
/// cgroup v2 directory when one is given. Network and file-rate limits are
/// reported unsupported.
class LinuxHostAdapter final : public HostAdapter {
 public:
  struct Options {
    /// cgroup v2 directory the process has been placed in; empty disables
    /// CPU and memory limits.
    std::string cgroup_dir;
    std::uint64_t cpu_period_us = 100000;
    /// Memory cap at share 1.0, in bytes. Zero means "max".
    std::uint64_t memory_default_bytes = 0;
  };

  LinuxHostAdapter() = default;
  explicit LinuxHostAdapter(Options options) : options_(std::move(options)) {}

  ProcessHandle attach(std::uint64_t host_pid) override;
  ApplyAck apply_shares(const ProcessHandle& handle, const ResourceShares& shares) override;
  Ack terminate(const ProcessHandle& handle) override;
  Ack pause(const ProcessHandle& handle) override;
  Ack resume(const ProcessHandle& handle) override;

 private:
  void require_alive(const ProcessHandle& handle) const;

  Options options_;
  std::map<std::uint64_t, ResourceShares> applied_;
  std::map<std::uint64_t, bool> paused_;
};
#endif

}  // namespace throttle
