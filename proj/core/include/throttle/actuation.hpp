#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace throttle {

enum class Resource : std::uint8_t { cpu = 0, memory = 1, network = 2, filesystem = 3 };

inline constexpr std::array<Resource, 4> kAllResources{
    Resource::cpu, Resource::memory, Resource::network, Resource::filesystem};

std::string_view to_string(Resource r);
Resource parse_resource(std::string_view text);

/// Fraction of each resource available to a process, relative to its
/// unthrottled default of 1.0.
class ResourceShares {
 public:
  constexpr ResourceShares() = default;
  constexpr ResourceShares(double cpu, double memory, double network, double filesystem)
      : values_{cpu, memory, network, filesystem} {}

  static constexpr ResourceShares unthrottled() { return {}; }

  constexpr double operator[](Resource r) const { return values_[index(r)]; }
  constexpr double& operator[](Resource r) { return values_[index(r)]; }

  constexpr double cpu() const { return values_[0]; }
  constexpr double memory() const { return values_[1]; }
  constexpr double network() const { return values_[2]; }
  constexpr double filesystem() const { return values_[3]; }

  bool is_unthrottled() const;

  bool operator==(const ResourceShares&) const = default;

 private:
  static constexpr std::size_t index(Resource r) { return static_cast<std::size_t>(r); }

  std::array<double, 4> values_{1.0, 1.0, 1.0, 1.0};
};

class ResourceSet {
 public:
  constexpr ResourceSet() = default;
  constexpr ResourceSet(std::initializer_list<Resource> resources) {
    for (Resource r : resources) insert(r);
  }
  static constexpr ResourceSet all() {
    return {Resource::cpu, Resource::memory, Resource::network, Resource::filesystem};
  }

  constexpr void insert(Resource r) { bits_ |= bit(r); }
  constexpr bool contains(Resource r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

  bool operator==(const ResourceSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Resource r) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r));
  }
  std::uint8_t bits_ = 0;
};

enum class ActuationMode { multiplicative, additive };

std::string_view to_string(ActuationMode m);

/// Per-resource minimum shares: 1% CPU, 90% memory, 1e-6 network, 1% file rate.
inline constexpr ResourceShares kDefaultFloors{0.01, 0.9, 1e-6, 0.01};

/// How a change in threat index turns into a change in resource shares.
///
/// A threat rise of dT lowers each targeted share:
///   multiplicative: s * (1 - gamma)^dT
///   additive:       s - gamma * dT
/// and a drop raises it by the mirrored rule, bounded by [floor, 1].
class ActuatorPolicy {
 public:
  ActuatorPolicy(double gamma, ActuationMode mode, ResourceSet targets,
                 ResourceShares floors = kDefaultFloors);

  double gamma() const noexcept { return gamma_; }
  ActuationMode mode() const noexcept { return mode_; }
  const ResourceSet& targets() const noexcept { return targets_; }
  const ResourceShares& floors() const noexcept { return floors_; }
  double floor(Resource r) const { return floors_[r]; }

  bool operator==(const ActuatorPolicy&) const = default;

 private:
  double gamma_;
  ActuationMode mode_;
  ResourceSet targets_;
  ResourceShares floors_;
};

/// Throws ValidationError unless every share is within (0, 1] and every
/// targeted share is at or above its floor.
void validate_shares(const ResourceShares& shares, const ActuatorPolicy& policy);

ResourceShares actuate(const ResourceShares& shares, double threat_delta,
                       const ActuatorPolicy& policy);

/// Lifts every restriction.
ResourceShares actuate_reset(const ResourceShares& shares, const ActuatorPolicy& policy);

struct SchedulerModel {
  double target_latency_ms = 20.0;
  std::vector<double> weights;
};

/// CFS-style split of the targeted latency in proportion to weight.
std::vector<double> cfs_timeslice(const SchedulerModel& model);

/// Folds multiplicative actuation over a sequence of threat deltas, starting
/// from the default weight, never dropping below default_weight * s_min.
double weight_for_threat(double default_weight, std::span<const double> threat_deltas,
                         double gamma, double s_min);

}  // namespace throttle
