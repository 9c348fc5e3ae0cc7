#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fstream>

#include <sys/types.h>

#include <fmt/format.h>

#include "throttle/error.hpp"
#include "throttle/host_adapter.hpp"

namespace throttle {

namespace {

bool process_exists(pid_t pid) { return ::kill(pid, 0) == 0 || errno == EPERM; }

pid_t to_pid(std::uint64_t id) { return static_cast<pid_t>(id); }

// Returns false when the control file cannot be written.
bool write_control(const std::string& path, const std::string& value) {
  std::ofstream out(path);
  if (!out) return false;
  out << value << '\n';
  return static_cast<bool>(out.flush());
}

}  // namespace

void LinuxHostAdapter::require_alive(const ProcessHandle& handle) const {
  if (!process_exists(to_pid(handle.id)))
    throw StaleHandle(fmt::format("process {} has exited", handle.id));
}

ProcessHandle LinuxHostAdapter::attach(std::uint64_t host_pid) {
  if (host_pid == 0 || !process_exists(to_pid(host_pid)))
    throw StaleHandle(fmt::format("no such process {}", host_pid));
  applied_[host_pid] = ResourceShares::unthrottled();
  paused_[host_pid] = false;
  return {host_pid, ResourceShares::unthrottled()};
}

ApplyAck LinuxHostAdapter::apply_shares(const ProcessHandle& handle,
                                        const ResourceShares& shares) {
  require_alive(handle);
  ApplyAck ack;
  auto& current = applied_[handle.id];
  ack.deduplicated = current == shares;

  const auto set = [&](Resource r, ApplyStatus s) {
    ack.status[static_cast<std::size_t>(r)] = s;
  };

  if (options_.cgroup_dir.empty()) {
    set(Resource::cpu, ApplyStatus::unsupported);
    set(Resource::memory, ApplyStatus::unsupported);
  } else {
    if (current.cpu() == shares.cpu()) {
      set(Resource::cpu, ApplyStatus::unchanged);
    } else {
      const auto period = options_.cpu_period_us;
      const std::string value =
          shares.cpu() >= 1.0
              ? fmt::format("max {}", period)
              : fmt::format("{} {}",
                            std::max<std::uint64_t>(
                                1000, static_cast<std::uint64_t>(
                                          std::llround(shares.cpu() * static_cast<double>(period)))),
                            period);
      set(Resource::cpu, write_control(options_.cgroup_dir + "/cpu.max", value)
                             ? ApplyStatus::applied
                             : ApplyStatus::denied);
    }
    if (current.memory() == shares.memory()) {
      set(Resource::memory, ApplyStatus::unchanged);
    } else if (options_.memory_default_bytes == 0) {
      set(Resource::memory, ApplyStatus::unsupported);
    } else {
      const std::string value =
          shares.memory() >= 1.0
              ? std::string("max")
              : fmt::format("{}", static_cast<std::uint64_t>(
                                      shares.memory() *
                                      static_cast<double>(options_.memory_default_bytes)));
      set(Resource::memory, write_control(options_.cgroup_dir + "/memory.max", value)
                                ? ApplyStatus::applied
                                : ApplyStatus::denied);
    }
  }
  set(Resource::network,
      shares.network() == 1.0 ? ApplyStatus::unchanged : ApplyStatus::unsupported);
  set(Resource::filesystem,
      shares.filesystem() == 1.0 ? ApplyStatus::unchanged : ApplyStatus::unsupported);

  for (Resource r : {Resource::cpu, Resource::memory}) {
    if (ack[r] == ApplyStatus::applied) current[r] = shares[r];
  }
  return ack;
}

Ack LinuxHostAdapter::terminate(const ProcessHandle& handle) {
  if (::kill(to_pid(handle.id), SIGKILL) != 0) {
    if (errno == ESRCH) return {true};
    throw Error(fmt::format("terminate {}: {}", handle.id, std::strerror(errno)));
  }
  applied_.erase(handle.id);
  paused_.erase(handle.id);
  return {false};
}

Ack LinuxHostAdapter::pause(const ProcessHandle& handle) {
  require_alive(handle);
  if (paused_[handle.id]) return {true};
  if (::kill(to_pid(handle.id), SIGSTOP) != 0)
    throw Error(fmt::format("pause {}: {}", handle.id, std::strerror(errno)));
  paused_[handle.id] = true;
  return {false};
}

Ack LinuxHostAdapter::resume(const ProcessHandle& handle) {
  require_alive(handle);
  if (!paused_[handle.id]) return {true};
  if (::kill(to_pid(handle.id), SIGCONT) != 0)
    throw Error(fmt::format("resume {}: {}", handle.id, std::strerror(errno)));
  paused_[handle.id] = false;
  return {false};
}

}  // namespace throttle
