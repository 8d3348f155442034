#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace wiacomm {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Injected time source. Components never read ambient time themselves.
using ClockFn = std::function<Timestamp()>;

[[nodiscard]] ClockFn system_clock();

/// Clock for scripted runs: starts at `start` and advances `step` on every read.
[[nodiscard]] ClockFn stepping_clock(Timestamp start, std::chrono::milliseconds step);

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
[[nodiscard]] std::string format_iso8601(Timestamp ts);

/// Inverse of format_iso8601. Throws std::invalid_argument on other layouts.
[[nodiscard]] Timestamp parse_iso8601(std::string_view text);

}  // namespace wiacomm
