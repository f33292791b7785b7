#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wildwarn/ingest.hpp"
#include "wildwarn/model.hpp"
#include "wildwarn/warn.hpp"

namespace wildwarn {

// --- descriptive profiles --------------------------------------------------

/// Accident count per species, largest first (ties by name). Blank labels
/// are grouped under "unknown".
std::vector<std::pair<std::string, std::size_t>> species_profile(const Dataset& data);

/// 24-bin hour-of-day histogram per season, indexed like `seasons.seasons()`.
std::vector<std::array<std::size_t, kHoursPerDay>> hourly_profile(const Dataset& data, const SeasonScheme& seasons);

// --- speed correlation -----------------------------------------------------

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of mid-ranks (ties share their average rank).
double spearman(std::span<const double> x, std::span<const double> y);

struct SpeedSample {
  LineId line;
  double x_from = 0.0;
  double speed = 0.0;     // km/h at the bin midpoint
  std::size_t accidents = 0;
  double trains = 0.0;    // daily trains m(l, x, dx)
  double rate = 0.0;      // accidents / trains
};

struct CorrelationReport {
  std::size_t n = 0;
  double pearson = 0.0;
  double spearman = 0.0;
  std::vector<SpeedSample> pairs;
};

/// Pairs each traffic bin's accidents-per-train with the line's maximal
/// speed at the bin midpoint. Bins without traffic or speed are dropped.
/// Throws ComputationError with fewer than 3 bins or zero variance.
CorrelationReport speed_correlation(const Dataset& data, const TrafficTable& traffic,
                                    const std::map<LineId, SpeedProfile>& speeds, double delta_x);

// --- hold-out evaluation ---------------------------------------------------

struct EvalOptions {
  /// Also count a hit when a neighbouring x bin (same line, month, hour) is warned.
  bool relaxed = false;
};

struct EvalPoint {
  double theta = 0.0;
  std::size_t hits = 0;
  std::size_t mappable = 0;
  double hit_rate = 0.0;
  std::size_t warned_cells = 0;
  std::size_t traffic_cells = 0;
  double warned_fraction = 0.0;
  double warned_traffic_fraction = 0.0;  // share of train passages in warned cells
};

struct EvalReport {
  std::size_t n_test = 0;
  std::size_t unmapped = 0;  // test accidents outside the grid
  bool relaxed = false;
  std::vector<EvalPoint> curve;  // one point per threshold, ascending theta
};

/// Scores warnings against later accidents. Each test accident maps to its
/// (line, month, hour bin, x bin) cell; accidents without a grid cell are
/// counted as unmapped and excluded from the hit rate.
EvalPoint evaluate_holdout(const WarningGrid& grid, const Dataset& test, double theta, const EvalOptions& options = {});

EvalReport evaluate_curve(const WarningGrid& grid, const Dataset& test, std::vector<double> thresholds,
                          const EvalOptions& options = {});

/// Draws accidents from the model's own cell intensities (temporal part times
/// spatial part); dates fall in `year`, minute and km uniform inside the cell.
Dataset sample_from_model(const FittedModel& model, std::size_t n, std::uint64_t seed, int year);

}  // namespace wildwarn
