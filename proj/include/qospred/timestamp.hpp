#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace qospred {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Parses `YYYY-MM-DDTHH:MM[:SS[.fff]][Z]` (UTC). Returns nullopt and sets
/// `error_offset` to the failing character on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::size_t* error_offset = nullptr);

/// Minute resolution when seconds are zero, otherwise seconds and, when
/// needed, milliseconds.
std::string format_timestamp(Timestamp t);

/// Minutes since the Unix epoch.
double to_minutes(Timestamp t);
Timestamp from_minutes(double minutes);

}  // namespace qospred
