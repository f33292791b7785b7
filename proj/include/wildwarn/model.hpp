#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wildwarn/binning.hpp"
#include "wildwarn/ingest.hpp"

namespace wildwarn {

struct Season {
  std::string label;
  std::vector<int> months;

  bool operator==(const Season&) const = default;
};

/// Partition of the twelve months into groups that share one hourly profile.
class SeasonScheme {
 public:
  /// {11,12,1,2} short daylight, {5,6,7,8} long daylight, {3,4,9,10} intermediate.
  SeasonScheme();
  /// Throws InputError unless every month 1..12 appears exactly once.
  explicit SeasonScheme(std::vector<Season> seasons);

  /// `label=11,12,1,2;label=5,6,7,8;...`; labels are optional (`11,12,1,2;...`).
  static SeasonScheme parse(std::string_view text);
  std::string to_string() const;

  std::size_t size() const noexcept { return seasons_.size(); }
  const std::vector<Season>& seasons() const noexcept { return seasons_; }
  std::size_t index_of(int month) const { return month_to_season_.at(static_cast<std::size_t>(month - 1)); }

  bool operator==(const SeasonScheme& o) const { return seasons_ == o.seasons_; }

 private:
  std::vector<Season> seasons_;
  std::array<std::size_t, kMonths> month_to_season_{};
};

struct FitOptions {
  DayCount day_count = DayCount::calendar;
  /// Additive (Laplace) pseudo-count for the probability tables; 0 keeps raw frequencies.
  double smoothing = 0.0;
  /// Known line ends (km) for clamping accidents on the final bin edge.
  std::map<LineId, double> line_ends;
};

/// Raw counts behind every table, kept for audit and serialization.
struct ModelCounts {
  long n = 0;                                    // N
  double t_days = 0.0;                           // T
  std::array<long, kMonths> per_month{};         // N_tau, index month-1
  std::vector<long> per_season;                  // N^(T_i)
  std::vector<std::vector<long>> per_season_bin; // N^(T_i)_{t,t+dt}, [season][t_bin]
  std::map<LineId, long> per_line;               // N_l
  std::map<LineId, std::map<long, long>> per_segment;  // N^(l)_{x,x+dx}, line -> x_bin -> count

  bool operator==(const ModelCounts&) const = default;
};

/// Inclusive x-bin range a line's segment distribution is defined over.
struct SegmentRange {
  long first = 0;
  long last = 0;
  bool operator==(const SegmentRange&) const = default;
};

/// Immutable set of estimated tables. Every accessor is const and the object
/// can be shared across threads.
///
/// Undefined probabilities (a zero denominator with no smoothing) come back
/// as std::nullopt, never as NaN.
class FittedModel {
 public:
  FittedModel(ModelCounts counts, SeasonScheme seasons, Binner binner, DayCount day_count,
              double smoothing, Period period);

  /// Expected accidents per day in `month`: N_tau / (T / 12).
  double mu(int month) const { return mu_.at(static_cast<std::size_t>(month - 1)); }

  /// P(accident falls in hour bin | month), from the month's season.
  std::optional<double> p_time(int month, int t_bin) const;

  /// N_l / N; zero for lines without accidents.
  double p_line(const LineId& line) const;

  /// N^(l)_bin / N_l; nullopt when the line has no accidents.
  std::optional<double> p_segment(const LineId& line, long x_bin) const;

  /// p(x, dx | l) p(l). A zero line probability short-circuits to 0.
  std::optional<double> spatial_part(const LineId& line, long x_bin) const;

  /// p(t, dt | tau) mu(tau). A zero rate short-circuits to 0.
  std::optional<double> temporal_part(int month, int t_bin) const;

  /// Lines with at least one accident, sorted.
  std::vector<LineId> lines() const;
  std::optional<SegmentRange> segment_range(const LineId& line) const;

  const ModelCounts& counts() const noexcept { return counts_; }
  const SeasonScheme& seasons() const noexcept { return seasons_; }
  const Binner& binner() const noexcept { return binner_; }
  const BinConfig& bins() const noexcept { return binner_.bins(); }
  DayCount day_count() const noexcept { return day_count_; }
  double smoothing() const noexcept { return smoothing_; }
  const Period& period() const noexcept { return period_; }

 private:
  ModelCounts counts_;
  SeasonScheme seasons_;
  Binner binner_;
  DayCount day_count_;
  double smoothing_;
  Period period_;

  std::array<double, kMonths> mu_{};
  std::vector<std::vector<std::optional<double>>> p_time_;
  std::map<LineId, double> p_line_;
  std::map<LineId, SegmentRange> ranges_;
  std::map<LineId, std::vector<double>> p_segment_;  // indexed from range.first
};

/// Counts the dataset once and derives all tables. Throws InputError on an
/// empty dataset or bad bin configuration.
FittedModel fit(const Dataset& data, const SeasonScheme& seasons, const BinConfig& bins,
                const FitOptions& options = {});

// Direct estimators over a dataset. They recount on every call and exist for
// single-cell queries and cross-checks against `fit`.

double estimate_mu(const Dataset& data, int month, DayCount day_count = DayCount::calendar);

/// nullopt when the month's season has no accidents.
std::optional<double> estimate_p_time(const Dataset& data, const SeasonScheme& seasons, int month,
                                      int hour, int delta_t);

double estimate_p_line(const Dataset& data, const LineId& line);

/// nullopt when the line has no accidents.
std::optional<double> estimate_p_segment(const Dataset& data, const LineId& line, double x_km,
                                         double delta_x);

std::optional<double> spatial_part(const FittedModel& model, const LineId& line, double x_km);
std::optional<double> temporal_part(const FittedModel& model, int month, int hour);

}  // namespace wildwarn
