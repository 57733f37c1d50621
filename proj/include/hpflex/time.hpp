#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace hpflex {

using Timestamp = std::chrono::sys_seconds;

inline constexpr std::chrono::hours kHour{1};

/// Parses `YYYY-MM-DDTHH:MM[:SS][Z|+00:00]`. Only UTC is accepted.
inline std::optional<Timestamp> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail[16] = {0};
  std::string buf(text);
  int n = std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%15s", &y, &mo, &d, &h, &mi, &s, tail);
  if (n < 6) {
    s = 0;
    tail[0] = 0;
    n = std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2u:%2u%15s", &y, &mo, &d, &h, &mi, tail);
    if (n < 5) return std::nullopt;
  }
  std::string_view zone(tail);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) return std::nullopt;
  year_month_day ymd{year{y} / month{mo} / day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{s};
}

inline std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), long(hms.hours().count()),
                long(hms.minutes().count()), long(hms.seconds().count()));
  return buf;
}

/// Hour of day in a fixed-offset local time.
inline int local_hour(Timestamp t, int utc_offset_h = 0) {
  using namespace std::chrono;
  auto local = t + hours{utc_offset_h};
  auto since_midnight = local - floor<days>(local);
  return int(duration_cast<hours>(since_midnight).count());
}

inline unsigned day_of_month(Timestamp t) {
  using namespace std::chrono;
  return unsigned(year_month_day{floor<days>(t)}.day());
}

inline unsigned month_of_year(Timestamp t) {
  using namespace std::chrono;
  return unsigned(year_month_day{floor<days>(t)}.month());
}

}  // namespace hpflex
