#pragma once

#include <array>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "mfhurst/errors.hpp"

namespace mfhurst {

// Proleptic Gregorian calendar day. Stored as civil fields; arithmetic and
// gap computation go through the serial-day number (days since 1970-01-01).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend auto operator<=>(const Date&, const Date&) = default;

  static bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
  }

  bool valid() const {
    return month >= 1 && month <= 12 && day >= 1 &&
           day <= days_in_month(year, month);
  }

  // days_from_civil / civil_from_days, the standard O(1) conversions.
  long serial() const {
    long y = year;
    const int m = month;
    const int d = day;
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
  }

  static Date from_serial(long days) {
    days += 719468;
    const long era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe =
        (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                static_cast<int>(d)};
  }

  Date plus_days(long n) const { return from_serial(serial() + n); }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
  }
};

inline long days_between(const Date& a, const Date& b) {
  return b.serial() - a.serial();
}

namespace detail {

inline bool parse_int(std::string_view s, std::size_t& pos, int width_max,
                      int& out) {
  int value = 0;
  int digits = 0;
  while (pos < s.size() && digits < width_max && s[pos] >= '0' &&
         s[pos] <= '9') {
    value = value * 10 + (s[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0) return false;
  out = value;
  return true;
}

inline bool parse_month_name(std::string_view s, std::size_t& pos, int& out) {
  static constexpr std::array<const char*, 12> names = {
      "jan", "feb", "mar", "apr", "may", "jun",
      "jul", "aug", "sep", "oct", "nov", "dec"};
  if (pos + 3 > s.size()) return false;
  char lower[3];
  for (int i = 0; i < 3; ++i) {
    char c = s[pos + static_cast<std::size_t>(i)];
    lower[i] = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  for (int m = 0; m < 12; ++m) {
    if (lower[0] == names[static_cast<std::size_t>(m)][0] &&
        lower[1] == names[static_cast<std::size_t>(m)][1] &&
        lower[2] == names[static_cast<std::size_t>(m)][2]) {
      out = m + 1;
      pos += 3;
      // skip the rest of a spelled-out month ("January")
      while (pos < s.size() &&
             ((s[pos] >= 'a' && s[pos] <= 'z') ||
              (s[pos] >= 'A' && s[pos] <= 'Z')))
        ++pos;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Parses `text` against a strftime-like format. Supported directives:
// %Y (4-digit year), %y (2-digit year, 2000-based), %m, %d, %b (month name).
// Any other character in the format must match literally.
inline bool try_parse_date(std::string_view text, std::string_view format,
                           Date& out) {
  std::size_t tp = 0;
  int y = -1, m = -1, d = -1;
  for (std::size_t fp = 0; fp < format.size(); ++fp) {
    if (format[fp] == '%' && fp + 1 < format.size()) {
      ++fp;
      switch (format[fp]) {
        case 'Y':
          if (!detail::parse_int(text, tp, 4, y)) return false;
          break;
        case 'y':
          if (!detail::parse_int(text, tp, 2, y)) return false;
          y += 2000;
          break;
        case 'm':
          if (!detail::parse_int(text, tp, 2, m)) return false;
          break;
        case 'd':
          if (!detail::parse_int(text, tp, 2, d)) return false;
          break;
        case 'b':
          if (!detail::parse_month_name(text, tp, m)) return false;
          break;
        case '%':
          if (tp >= text.size() || text[tp] != '%') return false;
          ++tp;
          break;
        default:
          return false;
      }
    } else {
      if (tp >= text.size() || text[tp] != format[fp]) return false;
      ++tp;
    }
  }
  if (tp != text.size()) return false;
  if (y < 0 || m < 0 || d < 0) return false;
  Date candidate{y, m, d};
  if (!candidate.valid()) return false;
  out = candidate;
  return true;
}

inline Date parse_date(std::string_view text,
                       std::string_view format = "%Y-%m-%d") {
  Date date;
  if (!try_parse_date(text, format, date))
    raise(ErrorCode::ParseError, "cannot parse date '" + std::string(text) +
                                     "' with format '" + std::string(format) +
                                     "'");
  return date;
}

}  // namespace mfhurst
