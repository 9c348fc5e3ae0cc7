#include "throttle/actuation.hpp"

#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "throttle/error.hpp"

namespace throttle {
namespace {

ActuatorPolicy cpu_policy(ActuationMode mode, double gamma = 0.1) {
  return ActuatorPolicy(gamma, mode, {Resource::cpu});
}

TEST(Actuate, MultiplicativeTenPercentDrop) {
  const auto out = actuate({}, 1.0, cpu_policy(ActuationMode::multiplicative));
  EXPECT_DOUBLE_EQ(out.cpu(), 0.9);
  EXPECT_EQ(out.memory(), 1.0);
}

TEST(Actuate, ZeroDeltaIsIdentity) {
  const ResourceShares s(0.5, 0.95, 0.25, 0.3);
  const ActuatorPolicy all(0.1, ActuationMode::additive, ResourceSet::all());
  EXPECT_EQ(actuate(s, 0.0, all), s);
}

TEST(Actuate, AdditiveClampsAtFloor) {
  const ResourceShares s(0.04, 1.0, 1.0, 1.0);
  const auto out = actuate(s, 5.0, cpu_policy(ActuationMode::additive));
  EXPECT_EQ(out.cpu(), 0.01);
}

TEST(Actuate, RestorationClampsAtOne) {
  const ResourceShares s(0.95, 1.0, 1.0, 1.0);
  EXPECT_EQ(actuate(s, -3.0, cpu_policy(ActuationMode::additive)).cpu(), 1.0);
  EXPECT_EQ(actuate(s, -3.0, cpu_policy(ActuationMode::multiplicative)).cpu(), 1.0);
}

TEST(Actuate, UntargetedResourcesUntouched) {
  const ActuatorPolicy p(0.2, ActuationMode::additive, {Resource::network, Resource::filesystem});
  const auto out = actuate({}, 2.0, p);
  EXPECT_EQ(out.cpu(), 1.0);
  EXPECT_EQ(out.memory(), 1.0);
  EXPECT_DOUBLE_EQ(out.network(), 0.6);
  EXPECT_DOUBLE_EQ(out.filesystem(), 0.6);
}

TEST(Actuate, RejectsInvalidShares) {
  const auto p = cpu_policy(ActuationMode::additive);
  EXPECT_THROW(actuate(ResourceShares(0.001, 1, 1, 1), 1.0, p), ValidationError);
  EXPECT_THROW(actuate(ResourceShares(1, 1.5, 1, 1), 1.0, p), ValidationError);
  EXPECT_THROW(actuate(ResourceShares(1, 0.0, 1, 1), 1.0, p), ValidationError);
}

TEST(ActuatorPolicy, Validation) {
  EXPECT_THROW(ActuatorPolicy(0.0, ActuationMode::additive, {Resource::cpu}), ValidationError);
  EXPECT_THROW(ActuatorPolicy(1.0, ActuationMode::additive, {Resource::cpu}), ValidationError);
  EXPECT_THROW(ActuatorPolicy(0.1, ActuationMode::additive, ResourceSet{}), ValidationError);
  ResourceShares floors = kDefaultFloors;
  floors[Resource::memory] = 1.0;
  EXPECT_THROW(ActuatorPolicy(0.1, ActuationMode::additive, {Resource::cpu}, floors),
               ValidationError);
}

TEST(ActuateReset, RestoresEverything) {
  const ActuatorPolicy p(0.1, ActuationMode::additive, ResourceSet::all());
  EXPECT_TRUE(actuate_reset(ResourceShares(0.01, 1, 1, 0.5), p).is_unthrottled());
  EXPECT_TRUE(actuate_reset(ResourceShares{}, p).is_unthrottled());
  EXPECT_EQ(actuate_reset(ResourceShares(0.37, 1, 1, 1), p).cpu(), 1.0);
}

TEST(CfsTimeslice, Examples) {
  EXPECT_EQ(cfs_timeslice({20.0, {1.0, 1.0}}), (std::vector<double>{10.0, 10.0}));
  EXPECT_EQ(cfs_timeslice({20.0, {3.0, 1.0}}), (std::vector<double>{15.0, 5.0}));
  EXPECT_EQ(cfs_timeslice({20.0, {1024.0}}), (std::vector<double>{20.0}));
}

TEST(CfsTimeslice, Errors) {
  EXPECT_THROW(cfs_timeslice({20.0, {}}), ValidationError);
  EXPECT_THROW(cfs_timeslice({20.0, {1.0, 0.0}}), ValidationError);
  EXPECT_THROW(cfs_timeslice({20.0, {1.0, -2.0}}), ValidationError);
}

TEST(CfsTimeslice, ConservesTargetLatency) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> weight(15.0, 88761.0);
  std::uniform_int_distribution<int> count(1, 64);
  for (int trial = 0; trial < 1000; ++trial) {
    SchedulerModel m{24.0, {}};
    for (int i = count(rng); i > 0; --i) m.weights.push_back(weight(rng));
    const auto slices = cfs_timeslice(m);
    EXPECT_NEAR(std::accumulate(slices.begin(), slices.end(), 0.0), 24.0, 1e-12);
  }
}

TEST(WeightForThreat, Composition) {
  const std::vector<double> up{1.0, 1.0};
  EXPECT_NEAR(weight_for_threat(1024.0, up, 0.1, 0.01), 0.81 * 1024.0, 1e-9);
  EXPECT_EQ(weight_for_threat(1024.0, {}, 0.1, 0.01), 1024.0);
  const std::vector<double> up_down{1.0, -1.0};
  EXPECT_NEAR(weight_for_threat(1.0, up_down, 0.1, 0.01), 0.99, 1e-12);
}

TEST(WeightForThreat, MatchesPerDeltaActuation) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> delta(-6, 10);
  const ActuatorPolicy p = [] {
    ResourceShares floors = kDefaultFloors;
    floors[Resource::cpu] = 0.05;
    return ActuatorPolicy(0.1, ActuationMode::multiplicative, {Resource::cpu}, floors);
  }();
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> deltas(20);
    for (auto& d : deltas) d = delta(rng);
    ResourceShares s;
    for (double d : deltas) s = actuate(s, d, p);
    EXPECT_DOUBLE_EQ(weight_for_threat(2.0, deltas, 0.1, 0.05), 2.0 * s.cpu());
  }
}

TEST(Properties, NonInverseByMode) {
  const auto mult = cpu_policy(ActuationMode::multiplicative);
  const auto add = cpu_policy(ActuationMode::additive);
  const ResourceShares start(0.5, 1, 1, 1);
  EXPECT_LT(actuate(actuate(start, 1.0, mult), -1.0, mult).cpu(), 0.5);
  EXPECT_DOUBLE_EQ(actuate(actuate(start, 1.0, add), -1.0, add).cpu(), 0.5);
}

TEST(Properties, SharesStayWithinFloorAndCeiling) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> delta(-30.0, 30.0);
  std::uniform_real_distribution<double> gamma(0.01, 0.99);
  std::bernoulli_distribution pick(0.5);
  for (int trial = 0; trial < 2000; ++trial) {
    ResourceSet targets;
    for (Resource r : kAllResources)
      if (pick(rng)) targets.insert(r);
    if (targets.empty()) targets.insert(Resource::cpu);
    const ActuatorPolicy p(gamma(rng),
                           pick(rng) ? ActuationMode::additive : ActuationMode::multiplicative,
                           targets);
    ResourceShares s;
    for (int i = 0; i < 20; ++i) {
      const double d = delta(rng);
      const auto next = actuate(s, d, p);
      for (Resource r : kAllResources) {
        ASSERT_LE(next[r], 1.0);
        if (targets.contains(r)) {
          ASSERT_GE(next[r], p.floor(r));
          if (d > 0) ASSERT_LE(next[r], s[r]);
          if (d < 0) ASSERT_GE(next[r], s[r]);
        } else {
          ASSERT_EQ(next[r], s[r]);
        }
      }
      s = next;
    }
    ASSERT_TRUE(actuate_reset(s, p).is_unthrottled());
  }
}

}  // namespace
}  // namespace throttle
