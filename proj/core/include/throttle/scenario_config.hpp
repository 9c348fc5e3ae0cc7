#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "throttle/detectors.hpp"
#include "throttle/progress.hpp"

namespace throttle {

/// Parses an INI scenario. Relative file references (traces, measurement
/// streams) resolve against `base_dir`. Throws ParseError/ValidationError.
///
/// `seed_override` replaces [scenario] seed; detectors without an explicit
/// seed derive theirs from the scenario seed.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Replaces every process's verdict source with its entry in `traces`.
/// Throws SourceExhausted for a process the trace does not mention.
void use_traces(Scenario& scenario, const std::map<std::string, TraceDetector>& traces);

/// Seed for a detector that has none of its own.
std::uint64_t derive_detector_seed(std::uint64_t scenario_seed, std::string_view detector_id,
                                   std::string_view process_id) noexcept;

}  // namespace throttle
