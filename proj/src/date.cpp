#include "wildwarn/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace wildwarn {

namespace {

std::chrono::year_month_day to_ymd(const Date& d) {
  return std::chrono::year{d.year} / std::chrono::month{static_cast<unsigned>(d.month)} /
         std::chrono::day{static_cast<unsigned>(d.day)};
}

bool parse_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

bool is_valid(const Date& d) {
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return false;
  return to_ymd(d).ok();
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  Date d;
  if (!parse_digits(text.substr(0, 4), d.year) || !parse_digits(text.substr(5, 2), d.month) ||
      !parse_digits(text.substr(8, 2), d.day))
    return std::nullopt;
  if (!is_valid(d)) return std::nullopt;
  return d;
}

std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

long day_number(const Date& d) {
  return static_cast<long>(std::chrono::sys_days{to_ymd(d)}.time_since_epoch().count());
}

long days_inclusive(const Date& first, const Date& last) {
  if (last < first) return 0;
  return day_number(last) - day_number(first) + 1;
}

long leap_days_inclusive(const Date& first, const Date& last) {
  if (last < first) return 0;
  long n = 0;
  for (int y = first.year; y <= last.year; ++y) {
    if (!std::chrono::year{y}.is_leap()) continue;
    const Date feb29{y, 2, 29};
    if (first <= feb29 && feb29 <= last) ++n;
  }
  return n;
}

}  // namespace wildwarn
