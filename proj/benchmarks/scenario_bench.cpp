#include <benchmark/benchmark.h>

#include <string>

#include "throttle/progress.hpp"

namespace {

throttle::Scenario make_scenario(std::uint64_t processes, std::uint64_t epochs) {
  throttle::Scenario s;
  s.epochs = epochs;
  s.rules.n_star = epochs;
  for (std::uint64_t i = 0; i < processes; ++i) {
    throttle::StochasticDetector d;
    d.tpr = 0.9;
    d.fpr = 0.04;
    d.ground_truth = i % 4 == 0 ? throttle::GroundTruth::attack : throttle::GroundTruth::benign;
    d.seed = i;
    throttle::ProgressModel m;
    m.respond(throttle::Resource::cpu, throttle::ResponseCurve::proportional());
    s.processes.push_back({"p" + std::to_string(i), m, throttle::VerdictSource(d), std::nullopt});
  }
  return s;
}

void BM_RunScenario(benchmark::State& state) {
  const auto s = make_scenario(static_cast<std::uint64_t>(state.range(0)), 1000);
  for (auto _ : state) benchmark::DoNotOptimize(throttle::run_scenario(s));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_RunScenario)->Arg(1)->Arg(16)->Arg(128);

}  // namespace
