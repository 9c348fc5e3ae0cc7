#include "throttle/host_adapter.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <fmt/format.h>

#include "throttle/csv.hpp"
#include "throttle/error.hpp"

namespace throttle {

std::string_view to_string(ApplyStatus s) {
  switch (s) {
    case ApplyStatus::applied: return "applied";
    case ApplyStatus::unchanged: return "unchanged";
    case ApplyStatus::unsupported: return "unsupported";
    case ApplyStatus::denied: return "denied";
  }
  return "unknown";
}

bool ApplyAck::fully_applied() const {
  return std::all_of(status.begin(), status.end(), [](ApplyStatus s) {
    return s == ApplyStatus::applied || s == ApplyStatus::unchanged;
  });
}

double SteadyClock::now_ms() const {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

void SteadyClock::sleep_for_ms(double ms) {
  if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

namespace {

std::string describe(const ResourceShares& s) {
  return fmt::format("cpu={} mem={} net={} fs={}", csv::fixed6(s.cpu()),
                     csv::fixed6(s.memory()), csv::fixed6(s.network()),
                     csv::fixed6(s.filesystem()));
}

}  // namespace

FakeHostAdapter::FakeProcess& FakeHostAdapter::live(const ProcessHandle& handle) {
  auto it = processes_.find(handle.id);
  if (it == processes_.end())
    throw StaleHandle(fmt::format("handle {} was never attached", handle.id));
  if (!it->second.alive) throw StaleHandle(fmt::format("handle {} has exited", handle.id));
  return it->second;
}

const FakeHostAdapter::FakeProcess& FakeHostAdapter::find(const ProcessHandle& handle) const {
  auto it = processes_.find(handle.id);
  if (it == processes_.end())
    throw StaleHandle(fmt::format("handle {} was never attached", handle.id));
  return it->second;
}

void FakeHostAdapter::record(std::uint64_t handle, std::string call, std::string args) {
  log_.push_back({log_.size() + 1, handle, std::move(call), std::move(args)});
}

void FakeHostAdapter::settle(FakeProcess& p) {
  const double t = now();
  if (p.alive && !p.paused) p.running_ms += t - p.last_change_ms;
  p.last_change_ms = t;
}

ProcessHandle FakeHostAdapter::attach(std::uint64_t host_pid) {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_handle_++;
  FakeProcess p;
  p.host_pid = host_pid;
  p.last_change_ms = now();
  processes_.emplace(id, p);
  record(id, "attach", fmt::format("pid={}", host_pid));
  return {id, ResourceShares::unthrottled()};
}

ApplyAck FakeHostAdapter::apply_shares(const ProcessHandle& handle,
                                       const ResourceShares& shares) {
  for (Resource r : kAllResources) {
    if (!(shares[r] > 0.0 && shares[r] <= 1.0))
      throw ValidationError("apply_shares: share outside (0, 1]");
  }
  std::lock_guard lock(mutex_);
  auto& p = live(handle);

  ApplyAck ack;
  bool any_change = false;
  for (Resource r : kAllResources) {
    const auto i = static_cast<std::size_t>(r);
    if (unsupported_[i]) {
      ack.status[i] = ApplyStatus::unsupported;
    } else if (denied_[i]) {
      ack.status[i] = ApplyStatus::denied;
    } else if (p.limits[r] == shares[r]) {
      ack.status[i] = ApplyStatus::unchanged;
    } else {
      p.limits[r] = shares[r];
      ack.status[i] = ApplyStatus::applied;
      any_change = true;
    }
  }
  ack.deduplicated = !any_change;
  record(handle.id, "apply_shares", describe(shares) + (ack.deduplicated ? " dedup=1" : ""));
  return ack;
}

Ack FakeHostAdapter::terminate(const ProcessHandle& handle) {
  std::lock_guard lock(mutex_);
  auto it = processes_.find(handle.id);
  if (it == processes_.end())
    throw StaleHandle(fmt::format("handle {} was never attached", handle.id));
  auto& p = it->second;
  if (!p.alive) {
    record(handle.id, "terminate", "noop");
    return {true};
  }
  settle(p);
  p.alive = false;
  record(handle.id, "terminate", "");
  return {false};
}

Ack FakeHostAdapter::pause(const ProcessHandle& handle) {
  std::lock_guard lock(mutex_);
  auto& p = live(handle);
  if (p.paused) {
    record(handle.id, "pause", "noop");
    return {true};
  }
  settle(p);
  p.paused = true;
  record(handle.id, "pause", "");
  return {false};
}

Ack FakeHostAdapter::resume(const ProcessHandle& handle) {
  std::lock_guard lock(mutex_);
  auto& p = live(handle);
  if (!p.paused) {
    record(handle.id, "resume", "noop");
    return {true};
  }
  settle(p);
  p.paused = false;
  record(handle.id, "resume", "");
  return {false};
}

void FakeHostAdapter::exit_process(const ProcessHandle& handle) {
  std::lock_guard lock(mutex_);
  auto& p = live(handle);
  settle(p);
  p.alive = false;
}

void FakeHostAdapter::set_unsupported(Resource r, bool unsupported) {
  std::lock_guard lock(mutex_);
  unsupported_[static_cast<std::size_t>(r)] = unsupported;
}

void FakeHostAdapter::set_denied(Resource r, bool denied) {
  std::lock_guard lock(mutex_);
  denied_[static_cast<std::size_t>(r)] = denied;
}

ResourceShares FakeHostAdapter::limits(const ProcessHandle& handle) const {
  std::lock_guard lock(mutex_);
  return find(handle).limits;
}

bool FakeHostAdapter::alive(const ProcessHandle& handle) const {
  std::lock_guard lock(mutex_);
  return find(handle).alive;
}

bool FakeHostAdapter::paused(const ProcessHandle& handle) const {
  std::lock_guard lock(mutex_);
  return find(handle).paused;
}

bool FakeHostAdapter::running(const ProcessHandle& handle) const {
  std::lock_guard lock(mutex_);
  const auto& p = find(handle);
  return p.alive && !p.paused;
}

double FakeHostAdapter::running_ms(const ProcessHandle& handle) const {
  std::lock_guard lock(mutex_);
  const auto& p = find(handle);
  double total = p.running_ms;
  if (p.alive && !p.paused) total += now() - p.last_change_ms;
  return total;
}

std::vector<AdapterCall> FakeHostAdapter::calls() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t FakeHostAdapter::count(std::string_view call) const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count_if(
      log_.begin(), log_.end(), [&](const AdapterCall& c) { return c.call == call; }));
}

void FakeHostAdapter::write_log_csv(std::ostream& out) const {
  std::lock_guard lock(mutex_);
  out << "seq,handle,call,args\n";
  for (const auto& c : log_)
    out << c.seq << ',' << c.handle << ',' << c.call << ',' << c.args << '\n';
}

DutyCycleThrottler::DutyCycleThrottler(HostAdapter& adapter, ProcessHandle handle,
                                       Clock& clock, double period_ms)
    : adapter_(adapter), handle_(handle), clock_(clock), period_ms_(period_ms) {
  if (!(period_ms > 0.0)) throw ValidationError("duty cycle: period must be positive");
}

void DutyCycleThrottler::run_period(double share) {
  if (!(share > 0.0 && share <= 1.0))
    throw ValidationError("duty cycle: share outside (0, 1]");
  adapter_.resume(handle_);
  clock_.sleep_for_ms(share * period_ms_);
  if (share < 1.0) {
    adapter_.pause(handle_);
    clock_.sleep_for_ms((1.0 - share) * period_ms_);
  }
}

}  // namespace throttle
