#pragma once

// Test-only helpers: synthetic data generators and a brute-force oracle that
// recomputes every table entry by filtering raw records. The oracle does not
// call into the model or warn code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wildwarn/ingest.hpp"

namespace wildwarn::testing {

inline std::filesystem::path data_dir() { return WILDWARN_TEST_DATA; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

struct SyntheticSpec {
  std::size_t max_records = 1000;
  int max_lines = 5;
  int max_line_km = 60;
};

/// Random dataset over 2019-01-01..2021-12-31. km values sit on a 0.1 km grid.
inline Dataset random_dataset(std::mt19937_64& rng, const SyntheticSpec& spec = {}) {
  std::uniform_int_distribution<std::size_t> n_dist(1, spec.max_records);
  std::uniform_int_distribution<int> lines_dist(1, spec.max_lines);
  const int n_lines = lines_dist(rng);
  std::vector<int> lengths;
  for (int l = 0; l < n_lines; ++l) lengths.push_back(std::uniform_int_distribution<int>(5, spec.max_line_km)(rng));
  // Skewed line choice so probabilities differ between lines.
  std::vector<double> line_w;
  for (int l = 0; l < n_lines; ++l) line_w.push_back(1.0 + l * l);
  std::discrete_distribution<int> line_pick(line_w.begin(), line_w.end());

  const std::size_t n = n_dist(rng);
  std::vector<AccidentRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    AccidentRecord r;
    r.date.year = std::uniform_int_distribution<int>(2019, 2021)(rng);
    r.date.month = std::uniform_int_distribution<int>(1, 12)(rng);
    r.date.day = std::uniform_int_distribution<int>(1, 28)(rng);
    r.minutes = std::uniform_int_distribution<int>(0, 1439)(rng);
    const int l = line_pick(rng);
    r.line = "L" + std::to_string(l + 1);
    r.km = std::uniform_int_distribution<int>(0, lengths[static_cast<std::size_t>(l)] * 10 - 1)(rng) / 10.0;
    r.species = (i % 3) ? "roe deer" : "wild boar";
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), Period{{2019, 1, 1}, {2021, 12, 31}});
}

/// Traffic covering each dataset line up to its furthest accident plus a
/// couple of bins; some bins are left without trains.
inline TrafficTable random_traffic(std::mt19937_64& rng, const Dataset& data, double delta_x) {
  TrafficTable t(delta_x);
  std::map<LineId, long> last;
  for (const auto& r : data.records()) last[r.line] = std::max(last[r.line], static_cast<long>(std::floor(r.km / delta_x)));
  std::uniform_int_distribution<int> count(0, 200);
  std::bernoulli_distribution gap(0.1);
  for (const auto& [line, b] : last)
    for (long k = 0; k <= b + 2; ++k)
      if (!gap(rng)) t.set(line, k, count(rng));
  return t;
}

/// Network of `lines` lines with `bins` 5 km bins each. Accident counts are
/// Poisson with a rate proportional to traffic only, so speed carries no risk.
struct SpeedNetwork {
  Dataset data;
  TrafficTable traffic{5.0};
  std::map<LineId, SpeedProfile> speeds;
};

inline SpeedNetwork speed_independent_network(std::mt19937_64& rng, int lines, int bins) {
  SpeedNetwork net;
  std::uniform_real_distribution<double> trains(40.0, 160.0);
  std::uniform_int_distribution<int> speed(6, 16);
  std::vector<AccidentRecord> records;
  for (int l = 0; l < lines; ++l) {
    const LineId line = "N" + std::to_string(l + 1);
    std::vector<SpeedInterval> iv;
    for (int b = 0; b < bins; ++b) {
      const double m = std::round(trains(rng));
      net.traffic.set(line, b, m);
      iv.push_back({b * 5.0, b * 5.0 + 4.0, speed(rng) * 10.0});
      const int n = std::poisson_distribution<int>(m * 0.05)(rng);
      for (int k = 0; k < n; ++k) records.push_back({{2021, 1 + k % 12, 1}, 600, line, b * 5.0 + 2.0, "roe deer"});
    }
    net.speeds.emplace(line, SpeedProfile(line, iv));
  }
  net.data = Dataset(std::move(records), {{2021, 1, 1}, {2021, 12, 31}});
  return net;
}

/// One train per bin and accidents equal to speed / 10, so accidents per
/// train is an exact linear function of speed.
inline SpeedNetwork linear_network(int bins) {
  SpeedNetwork net;
  std::vector<AccidentRecord> records;
  std::vector<SpeedInterval> iv;
  for (int b = 0; b < bins; ++b) {
    net.traffic.set("L", b, 1.0);
    const int v = 60 + 10 * (b % 11);
    iv.push_back({b * 5.0, b * 5.0 + 4.0, static_cast<double>(v)});
    for (int k = 0; k < v / 10; ++k) records.push_back({{2021, 3, 1}, 0, "L", b * 5.0 + 1.0, "fox"});
  }
  net.speeds.emplace("L", SpeedProfile("L", iv));
  net.data = Dataset(std::move(records), {{2021, 1, 1}, {2021, 12, 31}});
  return net;
}

// --- oracle -----------------------------------------------------------------

inline int oracle_season(int month) {
  if (month == 11 || month == 12 || month == 1 || month == 2) return 0;
  if (month >= 5 && month <= 8) return 1;
  return 2;
}

/// Per-hour traffic share written out case by case from the piecewise profile.
inline double oracle_hourly_share(int h) {
  if (h >= 0 && h < 4) return 0.05 / 4;
  if ((h >= 6 && h < 9) || (h >= 15 && h < 18)) return 0.4 / 6;
  return 0.55 / 14;
}

struct Oracle {
  const Dataset& data;
  double delta_x;
  int delta_t;
  double t_days;

  long count(auto&& pred) const {
    long n = 0;
    for (const auto& r : data.records()) n += pred(r) ? 1 : 0;
    return n;
  }
  /// Exact integer binning in tenths of a km; synthetic km values and bin
  /// widths both sit on the 0.1 km grid.
  long x_bin(double km) const { return std::lround(km * 10) / std::lround(delta_x * 10); }
  int t_bin(int minutes) const { return minutes / 60 / delta_t; }

  double mu(int month) const {
    return static_cast<double>(count([&](const AccidentRecord& r) { return r.date.month == month; })) / (t_days / 12.0);
  }
  /// Negative when undefined.
  double p_time(int month, int bin) const {
    const int s = oracle_season(month);
    const long den = count([&](const AccidentRecord& r) { return oracle_season(r.date.month) == s; });
    if (den == 0) return -1.0;
    const long num = count([&](const AccidentRecord& r) {
      return oracle_season(r.date.month) == s && t_bin(r.minutes) == bin;
    });
    return static_cast<double>(num) / static_cast<double>(den);
  }
  double p_line(const LineId& l) const {
    return static_cast<double>(count([&](const AccidentRecord& r) { return r.line == l; })) /
           static_cast<double>(data.size());
  }
  double p_segment(const LineId& l, long bin) const {
    const long den = count([&](const AccidentRecord& r) { return r.line == l; });
    if (den == 0) return -1.0;
    const long num = count([&](const AccidentRecord& r) { return r.line == l && x_bin(r.km) == bin; });
    return static_cast<double>(num) / static_cast<double>(den);
  }
  double window_trains(const TrafficTable& traffic, const LineId& l, long bin, int tb) const {
    double share = 0.0;
    for (int h = tb * delta_t; h < (tb + 1) * delta_t; ++h) share += oracle_hourly_share(h);
    return traffic.count(l, bin) * share;
  }
  /// Negative when the cell has no traffic.
  double p_pt(const TrafficTable& traffic, const LineId& l, int month, int tb, long bin) const {
    const double m = window_trains(traffic, l, bin, tb);
    if (m <= 0.0) return -1.0;
    const double pt = p_time(month, tb);
    const double temporal = mu(month) == 0.0 ? 0.0 : pt * mu(month);
    return temporal * p_segment(l, bin) * p_line(l) / m;
  }
};

}  // namespace wildwarn::testing
