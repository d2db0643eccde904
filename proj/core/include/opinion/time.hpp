#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace opinion {

// UTC instant at second resolution.
using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and a
// trailing "Z" or "+HH:MM"/"-HH:MM" (a space may replace 'T'; no suffix means
// UTC), or a plain integer count of epoch seconds.
std::optional<Timestamp> parse_timestamp(std::string_view s);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

// "YYYY-MM-DD" (with optional surrounding whitespace) to the day's index.
std::optional<std::chrono::sys_days> parse_date(std::string_view s);
std::string format_date(std::chrono::sys_days d);

// Fixed offset applied when bucketing timestamps for display.
class TzOffset {
 public:
  constexpr TzOffset() = default;
  constexpr explicit TzOffset(std::chrono::minutes m) : minutes_(m) {}

  // "Z", "+01:00", "-0530", "+2" and so on.
  static std::optional<TzOffset> parse(std::string_view s);
  // Dutch winter time; the bucketing default.
  static constexpr TzOffset amsterdam_winter() { return TzOffset(std::chrono::minutes(60)); }

  constexpr std::chrono::minutes minutes() const { return minutes_; }
  std::string str() const;

  friend constexpr bool operator==(TzOffset, TzOffset) = default;

 private:
  std::chrono::minutes minutes_{0};
};

}  // namespace opinion
