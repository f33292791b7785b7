#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wildwarn/binning.hpp"
#include "wildwarn/ingest.hpp"

namespace wildwarn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitInput = 2;

/// Settings for one CLI run: built-in defaults, then the optional JSON config
/// file, then explicit flags.
struct RunConfig {
  std::string accidents;
  std::string traffic;
  std::string geometry;
  std::string speeds;
  std::string model;
  std::string test;
  std::string out_dir = ".";

  BinConfig bins;
  std::string seasons;  // empty: default three-season scheme
  std::vector<double> thresholds{0.0005, 0.001, 0.002};
  DayCount day_count = DayCount::calendar;
  std::string period;  // empty: whole calendar years spanned by the data
  double smoothing = 0.0;
  double hex_spacing = 2.5;
  std::uint64_t seed = 1;
  std::size_t synthetic_test = 0;
  bool relaxed = false;
  bool all_year = false;
  unsigned threads = 0;
};

/// Sorts the thresholds and rejects non-positive or repeated values.
void normalize_thresholds(std::vector<double>& thresholds);

/// Parses `--days-per-year`: "365" or "calendar".
DayCount parse_day_count(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wildwarn::cli
