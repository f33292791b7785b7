#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace wildwarn {

struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

bool is_valid(const Date& d);

/// Parses strict `YYYY-MM-DD`; returns nullopt for bad syntax or a
/// non-existent calendar day.
std::optional<Date> parse_date(std::string_view text);

std::string to_string(const Date& d);

/// Days since 1970-01-01 (proleptic Gregorian).
long day_number(const Date& d);

/// Number of days in [first, last], both ends included. Zero if last < first.
long days_inclusive(const Date& first, const Date& last);

/// How many 29 Februaries fall inside [first, last].
long leap_days_inclusive(const Date& first, const Date& last);

}  // namespace wildwarn
