#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wildwarn/binning.hpp"
#include "wildwarn/date.hpp"

namespace wildwarn {

struct AccidentRecord {
  Date date;
  int minutes = 0;  // since midnight, [0, 1440)
  LineId line;
  double km = 0.0;
  std::string species;

  int month() const noexcept { return date.month; }
  int hour() const noexcept { return minutes / 60; }

  bool operator==(const AccidentRecord&) const = default;
};

/// Inclusive calendar range.
struct Period {
  Date start;
  Date end;

  bool contains(const Date& d) const { return start <= d && d <= end; }
  bool operator==(const Period&) const = default;
};

/// How the observation length T is counted. `fixed_365` drops every 29 February
/// so that three years give 3 * 365 days.
enum class DayCount { calendar, fixed_365 };

class Dataset {
 public:
  Dataset() = default;
  /// Throws InputError if a record falls outside `period` or the period is inverted.
  Dataset(std::vector<AccidentRecord> records, Period period);

  std::span<const AccidentRecord> records() const noexcept { return records_; }
  const Period& period() const noexcept { return period_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// T: number of observed days.
  double total_days(DayCount count = DayCount::calendar) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<AccidentRecord> records_;
  Period period_;
};

/// `HH:MM`, 24-hour clock.
std::optional<int> parse_time_of_day(std::string_view text);
std::string format_time_of_day(int minutes);

/// `YYYY-MM-DD:YYYY-MM-DD`.
Period parse_period(std::string_view text);

/// Reads the accidents CSV (`date,time,line,km,species`). Errors carry the
/// offending line number; an empty stream is an error.
Dataset parse_accidents(std::istream& in, const Period& period);

/// Same, with the period widened to whole calendar years around the records.
Dataset parse_accidents(std::istream& in);

void write_accidents(std::ostream& out, const Dataset& data);

/// Daily train counts m(l, x, delta_x) per line and spatial bin.
class TrafficTable {
 public:
  using Key = std::pair<LineId, long>;

  explicit TrafficTable(double delta_x = 5.0);

  double delta_x() const noexcept { return delta_x_; }

  /// Missing entries read as zero trains.
  double count(const LineId& line, long bin) const;

  void set(const LineId& line, long bin, double trains);
  void add(const LineId& line, long bin, double trains);

  const std::map<Key, double>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Every line with at least one entry, sorted.
  std::vector<LineId> lines() const;

 private:
  double delta_x_;
  std::map<Key, double> entries_;
};

struct TrainRun {
  LineId line;
  double km_from = 0.0;
  double km_to = 0.0;
  int departure = 0;  // minutes since midnight
};

/// Each run adds one train to every bin its [min(km), max(km)) span overlaps.
TrafficTable aggregate_runs(std::span<const TrainRun> runs, double delta_x);

/// Reads either `line,km_from,count` or per-train `line,km_from,km_to,departure`
/// records (detected from the header); the latter are aggregated.
TrafficTable parse_traffic(std::istream& in, double delta_x);

struct SpeedInterval {
  double km_from = 0.0;
  double km_to = 0.0;
  double vmax = 0.0;  // km/h
};

class SpeedProfile {
 public:
  SpeedProfile() = default;
  /// Sorts the intervals and rejects overlaps, empty spans or non-positive speeds.
  SpeedProfile(LineId line, std::vector<SpeedInterval> intervals);

  const LineId& line() const noexcept { return line_; }
  std::span<const SpeedInterval> intervals() const noexcept { return intervals_; }

  /// Highest vmax among intervals whose closed span covers `km`.
  std::optional<double> speed_at(double km) const;

 private:
  LineId line_;
  std::vector<SpeedInterval> intervals_;
};

/// Reads `line,km_from,km_to,vmax`.
std::map<LineId, SpeedProfile> parse_speeds(std::istream& in);

}  // namespace wildwarn
