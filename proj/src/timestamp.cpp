#include "qospred/timestamp.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace qospred {

namespace {

bool read_fixed(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') {
      pos += i;
      return false;
    }
    v = v * 10 + (c - '0');
  }
  pos += digits;
  out = v;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s, std::size_t* error_offset) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  auto fail = [&]() -> std::optional<Timestamp> {
    if (error_offset) *error_offset = pos;
    return std::nullopt;
  };
  if (!read_fixed(s, pos, 4, y) || !expect(s, pos, '-') || !read_fixed(s, pos, 2, mo) ||
      !expect(s, pos, '-') || !read_fixed(s, pos, 2, d)) {
    return fail();
  }
  if (!(expect(s, pos, 'T') || expect(s, pos, ' '))) return fail();
  if (!read_fixed(s, pos, 2, h) || !expect(s, pos, ':') || !read_fixed(s, pos, 2, mi)) return fail();
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_fixed(s, pos, 2, sec)) return fail();
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      int scale = 100;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        if (pos - start < 3) ms += (s[pos] - '0') * scale;
        scale /= 10;
        ++pos;
      }
      if (pos == start) return fail();
    }
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) return fail();

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) {
    pos = 0;
    return fail();
  }
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  auto rem = t - day_point;
  const auto h = duration_cast<hours>(rem);
  rem -= h;
  const auto mi = duration_cast<minutes>(rem);
  rem -= mi;
  const auto sec = duration_cast<seconds>(rem);
  rem -= sec;
  const auto ms = rem.count();

  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<int>(h.count()), static_cast<int>(mi.count()));
  if (sec.count() != 0 || ms != 0) {
    n += std::snprintf(buf + n, sizeof buf - n, ":%02d", static_cast<int>(sec.count()));
    if (ms != 0) n += std::snprintf(buf + n, sizeof buf - n, ".%03d", static_cast<int>(ms));
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

double to_minutes(Timestamp t) {
  return static_cast<double>(t.time_since_epoch().count()) / 60000.0;
}

Timestamp from_minutes(double minutes) {
  return Timestamp{std::chrono::milliseconds{static_cast<long long>(std::llround(minutes * 60000.0))}};
}

}  // namespace qospred
