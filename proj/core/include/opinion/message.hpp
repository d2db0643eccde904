#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "opinion/time.hpp"

namespace opinion {

enum class Platform { twitter, nunl, reddit };

inline constexpr std::array<Platform, 3> kPlatforms = {Platform::twitter, Platform::nunl,
                                                       Platform::reddit};

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view s);

// One social-media post. Immutable once accepted by a reader.
struct Message {
  std::string id;
  Timestamp timestamp;
  std::string text;
  std::string lang = "und";
  Platform platform = Platform::twitter;
  bool is_repost = false;

  friend bool operator==(const Message&, const Message&) = default;
};

}  // namespace opinion
