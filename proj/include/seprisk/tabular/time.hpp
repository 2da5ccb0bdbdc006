#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "seprisk/error.hpp"

namespace seprisk::tabular {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Accepts YYYY-MM-DD, optionally followed by THH:MM[:SS] and a trailing Z.
// Returns seconds since the Unix epoch (UTC).
inline double parse_iso8601(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10)
    throw ValidationError("invalid ISO-8601 time '" + s + "'");
  std::string rest = s.substr(10);
  if (!rest.empty()) {
    if (rest.back() == 'Z') rest.pop_back();
    int n = 0;
    if (rest.size() < 6 || (rest[0] != 'T' && rest[0] != ' ') ||
        std::sscanf(rest.c_str() + 1, "%2d:%2d%n", &h, &mi, &n) != 2)
      throw ValidationError("invalid ISO-8601 time '" + s + "'");
    const std::string tail = rest.substr(1 + static_cast<std::size_t>(n));
    if (!tail.empty()) {
      int m = 0;
      if (tail[0] != ':' || std::sscanf(tail.c_str() + 1, "%lf%n", &sec, &m) != 1 ||
          static_cast<std::size_t>(m) + 1 != tail.size())
        throw ValidationError("invalid ISO-8601 time '" + s + "'");
    }
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec < 0 || sec >= 61)
    throw ValidationError("invalid ISO-8601 time '" + s + "'");
  return static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) *
             86400.0 +
         h * 3600.0 + mi * 60.0 + sec;
}

inline std::string format_date(std::int64_t days_since_epoch) {
  // Inverse of days_from_civil.
  const std::int64_t z = days_since_epoch + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y + (m <= 2)), m, d);
  return buf;
}

}  // namespace seprisk::tabular
