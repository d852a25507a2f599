#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace tsn {

/// All simulated time is integer nanoseconds.
using TimeNs = std::chrono::nanoseconds;

inline constexpr TimeNs kMicrosecond{1'000};
inline constexpr TimeNs kMillisecond{1'000'000};

/// Parses "250us", "10ms", "1s", "12000ns" or a bare integer (nanoseconds).
/// Throws ParseError on malformed input.
TimeNs parse_duration(std::string_view text);

/// Shortest exact rendering with a unit suffix, e.g. "500us", "60ms", "1234ns".
std::string format_duration(TimeNs t);

inline double to_us(TimeNs t) { return static_cast<double>(t.count()) / 1e3; }

/// Rounds up to the next multiple of `quantum` (quantum > 0).
TimeNs ceil_to(TimeNs t, TimeNs quantum);

}  // namespace tsn
