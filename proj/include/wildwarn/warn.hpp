#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wildwarn/ingest.hpp"
#include "wildwarn/model.hpp"

namespace wildwarn {

/// A block of the day carrying a fixed share of the daily trains, spread
/// evenly over its hours. `hours` holds half-open [from, to) ranges.
struct ProfilePiece {
  std::vector<std::pair<int, int>> hours;
  double mass = 0.0;
};

/// Within-day distribution of train departures.
///
/// The default profile puts 5 % of trains in 0-4 h, 40 % in the peaks
/// 6-9 h and 15-18 h, and the remaining 55 % over the other 14 hours.
class TrafficProfile {
 public:
  TrafficProfile();

  /// Explicit pieces plus a remainder mass covering every hour no piece
  /// claims. Masses must be non-negative and sum to 1; pieces may not overlap.
  static TrafficProfile from_pieces(const std::vector<ProfilePiece>& pieces, double remainder_mass);

  /// Fraction of daily trains per hour, averaged over [hour, hour + delta_t).
  /// alpha * delta_t is the share of the day's trains inside the window.
  double alpha(int hour, int delta_t) const;

  double hourly(int hour) const { return hourly_.at(static_cast<std::size_t>(hour)); }

 private:
  explicit TrafficProfile(const std::array<double, kHoursPerDay>& hourly) : hourly_(hourly) {}

  std::array<double, kHoursPerDay> hourly_{};
};

/// alpha() of the default profile.
double alpha(int hour, int delta_t);

/// Expected trains through (line, x_bin) during [hour, hour + delta_t):
/// m(l, x, dx) * alpha(t, dt) * dt. Missing traffic entries give 0.
double traffic_m(const TrafficTable& traffic, const TrafficProfile& profile, const LineId& line, long x_bin,
                 int hour, int delta_t);

struct CellFlags {
  bool no_traffic = false;
  bool insufficient_data = false;
  bool exceeds_unity = false;

  bool operator==(const CellFlags&) const = default;
};

/// Per-train accident probability for one space-time cell.
struct CellEstimate {
  double m_window = 0.0;             // trains in the window
  std::optional<double> expected;    // temporal_part * spatial_part
  std::optional<double> p_pt;        // expected / m_window; absent when flagged
  CellFlags flags;
};

CellEstimate p_per_train(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                         int month, int hour, const LineId& line, double x_km);

struct CellKey {
  LineId line;
  int month = 1;
  int t_bin = 0;
  long x_bin = 0;

  auto operator<=>(const CellKey&) const = default;
};

struct WarningCell {
  CellKey key;
  CellEstimate estimate;
  std::vector<bool> warned;  // parallel to WarningGrid::thresholds()
};

/// Warning cells sorted by key. Cells with no traffic or insufficient data
/// carry no p_pt and are never warned.
class WarningGrid {
 public:
  WarningGrid(Binner binner, std::vector<double> thresholds, std::vector<WarningCell> cells);

  const Binner& binner() const noexcept { return binner_; }
  const BinConfig& bins() const noexcept { return binner_.bins(); }
  std::span<const double> thresholds() const noexcept { return thresholds_; }
  std::span<const WarningCell> cells() const noexcept { return cells_; }

  const WarningCell* find(const CellKey& key) const;
  bool has_line(const LineId& line) const;

 private:
  Binner binner_;
  std::vector<double> thresholds_;
  std::vector<WarningCell> cells_;
};

/// Warning rule: strictly above the threshold.
inline bool is_warned(const CellEstimate& e, double threshold) { return e.p_pt && *e.p_pt > threshold; }

/// One pass of the warning procedure: line `line`, month, hour window
/// starting at `hour`, every x bin from x0 to xf inclusive.
WarningGrid bayes_warn_animals(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                               const LineId& line, int month, int hour, std::span<const double> thresholds,
                               double x0, double xf);

/// Every model line over all months and hour bins. The x range of a line
/// spans its model segment range and its traffic entries. `threads` = 0
/// picks the hardware concurrency; the result does not depend on it.
WarningGrid sweep_all(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                      std::span<const double> thresholds, unsigned threads = 0);

struct AllYearKey {
  LineId line;
  int t_bin = 0;
  long x_bin = 0;

  auto operator<=>(const AllYearKey&) const = default;
};

/// Logical OR of the warning flags across months, per threshold.
std::map<AllYearKey, std::vector<bool>> aggregate_all_year(const WarningGrid& grid);

/// Number of warned cells per (line, month), one count per threshold.
std::map<std::pair<LineId, int>, std::vector<std::size_t>> warned_summary(const WarningGrid& grid);

}  // namespace wildwarn
