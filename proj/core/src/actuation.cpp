#include "throttle/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "throttle/error.hpp"

namespace throttle {

std::string_view to_string(Resource r) {
  switch (r) {
    case Resource::cpu: return "cpu";
    case Resource::memory: return "memory";
    case Resource::network: return "network";
    case Resource::filesystem: return "filesystem";
  }
  return "unknown";
}

Resource parse_resource(std::string_view text) {
  if (text == "cpu") return Resource::cpu;
  if (text == "memory" || text == "mem") return Resource::memory;
  if (text == "network" || text == "net") return Resource::network;
  if (text == "filesystem" || text == "fs") return Resource::filesystem;
  throw ParseError("unknown resource '" + std::string(text) + "'");
}

std::string_view to_string(ActuationMode m) {
  return m == ActuationMode::multiplicative ? "multiplicative" : "additive";
}

bool ResourceShares::is_unthrottled() const {
  return std::all_of(kAllResources.begin(), kAllResources.end(),
                     [this](Resource r) { return (*this)[r] == 1.0; });
}

ActuatorPolicy::ActuatorPolicy(double gamma, ActuationMode mode, ResourceSet targets,
                               ResourceShares floors)
    : gamma_(gamma), mode_(mode), targets_(targets), floors_(floors) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("actuator: gamma must lie in (0, 1)");
  if (targets.empty()) throw ValidationError("actuator: no target resources");
  for (Resource r : kAllResources) {
    const double f = floors[r];
    if (!(f > 0.0 && f < 1.0))
      throw ValidationError("actuator: floor for " + std::string(to_string(r)) +
                            " must lie in (0, 1)");
  }
}

void validate_shares(const ResourceShares& shares, const ActuatorPolicy& policy) {
  for (Resource r : kAllResources) {
    const double s = shares[r];
    if (!(s > 0.0 && s <= 1.0))
      throw ValidationError("share for " + std::string(to_string(r)) +
                            " outside (0, 1]");
    if (policy.targets().contains(r) && s < policy.floor(r))
      throw ValidationError("share for " + std::string(to_string(r)) +
                            " below its floor");
  }
}

ResourceShares actuate(const ResourceShares& shares, double threat_delta,
                       const ActuatorPolicy& policy) {
  validate_shares(shares, policy);
  if (!std::isfinite(threat_delta)) throw ValidationError("actuate: non-finite delta");
  if (threat_delta == 0.0) return shares;

  const double magnitude = std::abs(threat_delta);
  const bool throttle = threat_delta > 0.0;
  const double gamma = policy.gamma();

  ResourceShares out = shares;
  for (Resource r : kAllResources) {
    if (!policy.targets().contains(r)) continue;
    const double s = shares[r];
    double next = 0.0;
    if (policy.mode() == ActuationMode::multiplicative) {
      next = throttle ? s * std::pow(1.0 - gamma, magnitude)
                      : s * std::pow(1.0 + gamma, magnitude);
    } else {
      next = throttle ? s - gamma * magnitude : s + gamma * magnitude;
    }
    out[r] = std::clamp(next, policy.floor(r), 1.0);
  }
  return out;
}

ResourceShares actuate_reset(const ResourceShares& /*shares*/,
                             const ActuatorPolicy& /*policy*/) {
  return ResourceShares::unthrottled();
}

std::vector<double> cfs_timeslice(const SchedulerModel& model) {
  if (model.weights.empty()) throw ValidationError("cfs_timeslice: no processes");
  if (!(model.target_latency_ms > 0.0) || !std::isfinite(model.target_latency_ms))
    throw ValidationError("cfs_timeslice: target latency must be positive");
  for (double w : model.weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("cfs_timeslice: weights must be positive");
  }
  const double total = std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
  std::vector<double> slices;
  slices.reserve(model.weights.size());
  for (double w : model.weights) slices.push_back(model.target_latency_ms * (w / total));
  return slices;
}

double weight_for_threat(double default_weight, std::span<const double> threat_deltas,
                         double gamma, double s_min) {
  if (!(default_weight > 0.0) || !std::isfinite(default_weight))
    throw ValidationError("weight_for_threat: default weight must be positive");
  ResourceShares floors = kDefaultFloors;
  floors[Resource::cpu] = s_min;
  const ActuatorPolicy policy(gamma, ActuationMode::multiplicative, {Resource::cpu}, floors);

  ResourceShares relative;
  for (double delta : threat_deltas) relative = actuate(relative, delta, policy);
  return default_weight * relative.cpu();
}

}  // namespace throttle
