#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "throttle/actuation.hpp"
#include "throttle/threat.hpp"

namespace {

std::vector<throttle::Verdict> random_verdicts(std::size_t n) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  std::vector<throttle::Verdict> out(n);
  for (auto& v : out) v = coin(rng) ? throttle::Verdict::malicious : throttle::Verdict::benign;
  return out;
}

void BM_StepEpoch(benchmark::State& state) {
  const auto verdicts = random_verdicts(1024);
  throttle::ThreatRules rules;
  rules.n_star = 1u << 30;
  std::size_t i = 0;
  throttle::ThreatLedger ledger;
  for (auto _ : state) {
    ledger = throttle::step_epoch(ledger, verdicts[i++ & 1023], rules).ledger;
    benchmark::DoNotOptimize(ledger);
  }
}
BENCHMARK(BM_StepEpoch);

void BM_Actuate(benchmark::State& state) {
  const throttle::ActuatorPolicy policy(0.1, throttle::ActuationMode::multiplicative,
                                        throttle::ResourceSet::all());
  auto shares = throttle::ResourceShares::unthrottled();
  double delta = 1.0;
  for (auto _ : state) {
    shares = throttle::actuate(shares, delta, policy);
    delta = -delta;
    benchmark::DoNotOptimize(shares);
  }
}
BENCHMARK(BM_Actuate);

}  // namespace
