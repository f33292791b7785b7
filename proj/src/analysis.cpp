#include "wildwarn/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"

namespace wildwarn {

std::vector<std::pair<std::string, std::size_t>> species_profile(const Dataset& data) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : data.records()) {
    const auto label = csv::trim(r.species);
    ++counts[label.empty() ? "unknown" : std::string(label)];
  }
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<std::array<std::size_t, kHoursPerDay>> hourly_profile(const Dataset& data, const SeasonScheme& seasons) {
  std::vector<std::array<std::size_t, kHoursPerDay>> out(seasons.size());
  for (auto& row : out) row.fill(0);
  for (const auto& r : data.records()) ++out[seasons.index_of(r.month())][static_cast<std::size_t>(r.hour())];
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ComputationError("correlation needs paired samples");
  if (x.size() < 2) throw ComputationError("correlation needs at least two samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ComputationError("correlation undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> mid_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  return pearson(rx, ry);
}

CorrelationReport speed_correlation(const Dataset& data, const TrafficTable& traffic,
                                    const std::map<LineId, SpeedProfile>& speeds, double delta_x) {
  if (std::fabs(traffic.delta_x() - delta_x) > 1e-12 * delta_x)
    throw InputError("traffic delta_x does not match the requested delta_x");
  std::map<std::pair<LineId, long>, std::size_t> accidents;
  for (const auto& r : data.records()) ++accidents[{r.line, x_bin_of(r.km, delta_x)}];

  CorrelationReport report;
  for (const auto& [key, trains] : traffic.entries()) {
    if (!(trains > 0.0)) continue;
    const auto sp = speeds.find(key.first);
    if (sp == speeds.end()) continue;
    const double x_from = static_cast<double>(key.second) * delta_x;
    const auto v = sp->second.speed_at(x_from + delta_x / 2.0);
    if (!v) continue;
    const auto it = accidents.find(key);
    const std::size_t n = it == accidents.end() ? 0 : it->second;
    report.pairs.push_back({key.first, x_from, *v, n, trains, static_cast<double>(n) / trains});
  }
  report.n = report.pairs.size();
  if (report.n < 3) throw ComputationError("speed correlation needs at least 3 bins with traffic and speed, found " +
                                           std::to_string(report.n));
  std::vector<double> speed, rate;
  for (const auto& p : report.pairs) {
    speed.push_back(p.speed);
    rate.push_back(p.rate);
  }
  report.pearson = pearson(speed, rate);
  report.spearman = spearman(speed, rate);
  return report;
}

EvalPoint evaluate_holdout(const WarningGrid& grid, const Dataset& test, double theta, const EvalOptions& options) {
  if (test.empty()) throw InputError("test set is empty");
  if (std::isnan(theta) || theta < 0.0) throw InputError("theta must be non-negative");
  EvalPoint pt;
  pt.theta = theta;

  double traffic_total = 0.0;
  double traffic_warned = 0.0;
  for (const auto& cell : grid.cells()) {
    if (!(cell.estimate.m_window > 0.0)) continue;
    ++pt.traffic_cells;
    traffic_total += cell.estimate.m_window;
    if (is_warned(cell.estimate, theta)) {
      ++pt.warned_cells;
      traffic_warned += cell.estimate.m_window;
    }
  }
  if (pt.traffic_cells) pt.warned_fraction = static_cast<double>(pt.warned_cells) / static_cast<double>(pt.traffic_cells);
  if (traffic_total > 0.0) pt.warned_traffic_fraction = traffic_warned / traffic_total;

  const auto& binner = grid.binner();
  for (const auto& r : test.records()) {
    const CellKey key{r.line, r.month(), binner.t_bin(r.minutes), binner.x_bin(r.line, r.km)};
    const auto* cell = grid.find(key);
    if (!cell) continue;
    ++pt.mappable;
    bool hit = is_warned(cell->estimate, theta);
    if (!hit && options.relaxed) {
      for (long dx : {-1L, 1L}) {
        CellKey near = key;
        near.x_bin += dx;
        if (const auto* n = grid.find(near); n && is_warned(n->estimate, theta)) hit = true;
      }
    }
    pt.hits += hit;
  }
  if (pt.mappable) pt.hit_rate = static_cast<double>(pt.hits) / static_cast<double>(pt.mappable);
  return pt;
}

EvalReport evaluate_curve(const WarningGrid& grid, const Dataset& test, std::vector<double> thresholds,
                          const EvalOptions& options) {
  if (thresholds.empty()) throw InputError("at least one threshold is required");
  std::sort(thresholds.begin(), thresholds.end());
  EvalReport report;
  report.n_test = test.size();
  report.relaxed = options.relaxed;
  for (double t : thresholds) report.curve.push_back(evaluate_holdout(grid, test, t, options));
  report.unmapped = report.n_test - report.curve.front().mappable;
  return report;
}

Dataset sample_from_model(const FittedModel& model, std::size_t n, std::uint64_t seed, int year) {
  struct Target {
    int month;
    int t_bin;
    const LineId* line;
    long x_bin;
  };
  std::vector<Target> targets;
  std::vector<double> weights;
  const auto lines = model.lines();
  const auto& bins = model.bins();
  for (int m = 1; m <= kMonths; ++m)
    for (int b = 0; b < bins.hour_bins(); ++b) {
      const auto temporal = model.temporal_part(m, b);
      if (!temporal || *temporal <= 0.0) continue;
      for (const auto& line : lines) {
        const auto range = *model.segment_range(line);
        for (long x = range.first; x <= range.last; ++x) {
          const auto spatial = model.spatial_part(line, x);
          if (!spatial || *spatial <= 0.0) continue;
          targets.push_back({m, b, &line, x});
          weights.push_back(*temporal * *spatial);
        }
      }
    }
  if (targets.empty()) throw ComputationError("model has no positive cell to sample from");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<AccidentRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = targets[pick(rng)];
    const auto last_day = static_cast<unsigned>(
        (std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(t.month)} / std::chrono::last).day());
    AccidentRecord r;
    r.date = {year, t.month, 1 + static_cast<int>(std::min<double>(last_day - 1, std::floor(unit(rng) * last_day)))};
    const int window = bins.delta_t * 60;
    r.minutes = t.t_bin * window + std::min(window - 1, static_cast<int>(unit(rng) * window));
    r.line = *t.line;
    r.km = (static_cast<double>(t.x_bin) + 0.05 + 0.9 * unit(rng)) * bins.delta_x;
    r.species = "sampled";
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), Period{{year, 1, 1}, {year, 12, 31}});
}

}  // namespace wildwarn
