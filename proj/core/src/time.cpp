#include "opinion/time.hpp"

#include <charconv>
#include <cstdio>

namespace opinion {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<sys_days> date_at(std::string_view s, std::size_t pos) {
  int y, m, d;
  if (!read_int(s, pos, 4, y) || s.size() < pos + 10 || s[pos + 4] != '-' ||
      !read_int(s, pos + 5, 2, m) || s[pos + 7] != '-' || !read_int(s, pos + 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  s = strip(s);
  if (s.empty()) return std::nullopt;

  // Integer epoch seconds.
  if (s.find_first_not_of("0123456789-") == std::string_view::npos) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return Timestamp{seconds{v}};
  }

  auto day_part = date_at(s, 0);
  if (!day_part || s.size() < 19 || (s[10] != 'T' && s[10] != ' ')) return std::nullopt;
  int hh, mm, ss;
  if (!read_int(s, 11, 2, hh) || s[13] != ':' || !read_int(s, 14, 2, mm) || s[16] != ':' ||
      !read_int(s, 17, 2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    const std::size_t digits = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == digits) return std::nullopt;
  }
  minutes offset{0};
  if (pos < s.size()) {
    auto tz = TzOffset::parse(s.substr(pos));
    if (!tz) return std::nullopt;
    offset = tz->minutes();
  }
  return Timestamp{*day_part} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_timestamp(Timestamp t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<sys_days> parse_date(std::string_view s) {
  s = strip(s);
  if (s.size() != 10) return std::nullopt;
  return date_at(s, 0);
}

std::string format_date(sys_days d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<TzOffset> TzOffset::parse(std::string_view s) {
  s = strip(s);
  if (s == "Z" || s == "z" || s == "UTC") return TzOffset{};
  if (s.size() < 2 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  const int sign = s[0] == '-' ? -1 : 1;
  s.remove_prefix(1);
  int h = 0, m = 0;
  if (s.size() == 1 || s.size() == 2) {
    if (!read_int(s, 0, s.size(), h)) return std::nullopt;
  } else if (s.size() == 4) {
    if (!read_int(s, 0, 2, h) || !read_int(s, 2, 2, m)) return std::nullopt;
  } else if (s.size() == 5 && s[2] == ':') {
    if (!read_int(s, 0, 2, h) || !read_int(s, 3, 2, m)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (h > 14 || m > 59) return std::nullopt;
  return TzOffset{std::chrono::minutes{sign * (h * 60 + m)}};
}

std::string TzOffset::str() const {
  const auto total = minutes_.count();
  const auto a = total < 0 ? -total : total;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", total < 0 ? '-' : '+', static_cast<int>(a / 60),
                static_cast<int>(a % 60));
  return buf;
}

}  // namespace opinion
