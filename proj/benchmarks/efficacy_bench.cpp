#include <benchmark/benchmark.h>

#include <cmath>

#include "throttle/efficacy.hpp"

namespace {

void BM_RequiredMeasurements(benchmark::State& state) {
  throttle::EfficacyCurve curve;
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    curve.points.push_back({i * 10, 0.5 + 0.45 * std::sqrt(x), 0.3 * (1.0 - x) + 0.01});
  }
  const throttle::EfficacyTarget target{throttle::TargetKind::f1_at_least, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(throttle::required_measurements(curve, target));
}
BENCHMARK(BM_RequiredMeasurements)->Arg(10)->Arg(1000);

}  // namespace
