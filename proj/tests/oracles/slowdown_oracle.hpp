#pragma once

// Closed-form attack-progress sums for a single CPU-bound process with
// proportional progress: B_0 at full share plus B_i at the actuated share
// for i = 1..K-1. Threat deltas come from the pseudocode interpreter.

#include <algorithm>
#include <cmath>
#include <vector>

#include "algorithm_interpreter.hpp"

namespace oracle {

struct ProgressSums {
  double with_response;
  double without_response;
  double slowdown_pct;
  std::vector<double> shares;
};

inline ProgressSums additive_cpu_progress(const std::vector<bool>& malicious,
                                          std::uint64_t epochs, std::uint64_t n_star,
                                          double gamma, double floor, double base_rate = 1.0) {
  const auto steps = interpret(malicious, n_star);
  double share = 1.0;
  ProgressSums sums{base_rate, base_rate * static_cast<double>(epochs), 0.0, {1.0}};
  for (std::uint64_t i = 1; i < epochs; ++i) {
    const double delta = steps.at(i - 1).delta;
    if (delta > 0) share = std::max(floor, share - gamma * delta);
    if (delta < 0) share = std::min(1.0, share + gamma * -delta);
    sums.shares.push_back(share);
    sums.with_response += base_rate * share;
  }
  sums.slowdown_pct = (1.0 - sums.with_response / sums.without_response) * 100.0;
  return sums;
}

}  // namespace oracle
