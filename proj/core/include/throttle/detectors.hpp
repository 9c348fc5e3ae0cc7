#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "throttle/threat.hpp"

namespace throttle {

/// SplitMix64 output number `index` (0-based) for a generator seeded with
/// `seed`. Stateless, so verdicts for any epoch can be drawn independently.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
double unit_interval(std::uint64_t bits) noexcept;

/// Replays recorded verdicts; slot i holds the verdict for epoch i.
struct TraceDetector {
  std::vector<std::optional<Verdict>> verdicts;

  static TraceDetector from_list(const std::vector<Verdict>& list,
                                 std::uint64_t first_epoch = 0);
};

enum class GroundTruth { attack, benign };

/// Flags an attack with probability tpr and a benign process with
/// probability fpr, independently per epoch.
struct StochasticDetector {
  double tpr = 1.0;
  double fpr = 0.0;
  GroundTruth ground_truth = GroundTruth::attack;
  std::uint64_t seed = 0;
};

/// Malicious iff the mean of the last `window_size` samples (up to and
/// including the current epoch) exceeds `cutoff`.
struct ThresholdDetector {
  std::size_t window_size = 1;
  double cutoff = 0.0;
  /// Samples indexed by epoch; shared because streams can be long.
  std::shared_ptr<const std::vector<std::optional<double>>> stream;
};

enum class SourceKind { trace, stochastic, threshold };

class VerdictSource {
 public:
  VerdictSource(TraceDetector d);
  VerdictSource(StochasticDetector d);
  VerdictSource(ThresholdDetector d);

  SourceKind kind() const noexcept;

  /// Throws SourceExhausted when the source has nothing for `epoch`.
  Verdict next_verdict(std::uint64_t epoch) const;

  /// Largest epoch index this source can answer, or nullopt when unbounded.
  std::optional<std::uint64_t> last_epoch() const;

  const std::variant<TraceDetector, StochasticDetector, ThresholdDetector>& detail() const {
    return impl_;
  }

 private:
  std::variant<TraceDetector, StochasticDetector, ThresholdDetector> impl_;
};

Verdict next_verdict(const VerdictSource& source, std::uint64_t epoch);

/// `epoch,process,verdict` CSV, grouped by process id.
std::map<std::string, TraceDetector> read_trace_csv(std::istream& in);
std::map<std::string, TraceDetector> load_trace_csv(const std::string& path);

/// `epoch,value` CSV.
std::shared_ptr<const std::vector<std::optional<double>>> read_stream_csv(std::istream& in);
std::shared_ptr<const std::vector<std::optional<double>>> load_stream_csv(
    const std::string& path);

}  // namespace throttle
