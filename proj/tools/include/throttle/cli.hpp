#pragma once

#include <ostream>

namespace throttle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitUnreachable = 4;

/// Entry point for `throttlectl`; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace throttle::cli
