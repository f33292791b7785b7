#include "wildwarn/warn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"

namespace wildwarn {

namespace {

void check_thresholds(std::span<const double> thresholds) {
  if (thresholds.empty()) throw InputError("at least one threshold is required");
  for (double t : thresholds)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("thresholds must be finite and non-negative");
}

void check_traffic(const FittedModel& model, const TrafficTable& traffic) {
  const double a = model.bins().delta_x;
  const double b = traffic.delta_x();
  if (std::fabs(a - b) > 1e-12 * std::max(a, b))
    throw InputError("traffic delta_x " + csv::format_double(b) + " does not match model delta_x " +
                     csv::format_double(a));
}

CellEstimate estimate_cell(const std::optional<double>& temporal, const FittedModel& model, const TrafficTable& traffic,
                           const TrafficProfile& profile, const LineId& line, int hour, long x_bin) {
  CellEstimate e;
  e.m_window = traffic_m(traffic, profile, line, x_bin, hour, model.bins().delta_t);
  const auto spatial = model.spatial_part(line, x_bin);
  if (temporal && spatial) e.expected = *temporal * *spatial;
  e.flags.no_traffic = !(e.m_window > 0.0);
  e.flags.insufficient_data = !e.expected.has_value();
  if (!e.flags.no_traffic && !e.flags.insufficient_data) {
    e.p_pt = *e.expected / e.m_window;
    e.flags.exceeds_unity = *e.p_pt > 1.0;
  }
  return e;
}

WarningCell make_cell(CellKey key, CellEstimate e, std::span<const double> thresholds) {
  WarningCell cell{std::move(key), std::move(e), {}};
  cell.warned.reserve(thresholds.size());
  for (double t : thresholds) cell.warned.push_back(is_warned(cell.estimate, t));
  return cell;
}

struct LineSpan {
  LineId line;
  long first;
  long last;
  std::size_t offset;  // flattened index of the line's first cell
};

}  // namespace

// --- traffic profile -------------------------------------------------------

TrafficProfile::TrafficProfile()
    : TrafficProfile(from_pieces({{{{0, 4}}, 0.05}, {{{6, 9}, {15, 18}}, 0.4}}, 0.55)) {}

TrafficProfile TrafficProfile::from_pieces(const std::vector<ProfilePiece>& pieces, double remainder_mass) {
  std::array<int, kHoursPerDay> owner{};
  owner.fill(-1);
  double total = remainder_mass;
  if (!(remainder_mass >= 0.0)) throw InputError("profile masses must be non-negative");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].mass >= 0.0)) throw InputError("profile masses must be non-negative");
    total += pieces[i].mass;
    for (auto [from, to] : pieces[i].hours) {
      if (from < 0 || to > kHoursPerDay || from >= to) throw InputError("profile hour range must lie in [0, 24)");
      for (int h = from; h < to; ++h) {
        if (owner[static_cast<std::size_t>(h)] != -1) throw InputError("profile pieces overlap at hour " + std::to_string(h));
        owner[static_cast<std::size_t>(h)] = static_cast<int>(i);
      }
    }
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InputError("profile masses must sum to 1");

  std::vector<int> hours_per_piece(pieces.size() + 1, 0);
  for (int o : owner) ++hours_per_piece[o < 0 ? pieces.size() : static_cast<std::size_t>(o)];

  std::array<double, kHoursPerDay> hourly{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const std::size_t idx = owner[h] < 0 ? pieces.size() : static_cast<std::size_t>(owner[h]);
    const double mass = idx == pieces.size() ? remainder_mass : pieces[idx].mass;
    hourly[h] = mass / static_cast<double>(hours_per_piece[idx]);
  }
  if (hours_per_piece.back() == 0 && remainder_mass > 0.0)
    throw InputError("remainder mass given but every hour is claimed by a piece");
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (hours_per_piece[i] == 0 && pieces[i].mass > 0.0) throw InputError("profile piece with mass but no hours");
  return TrafficProfile(hourly);
}

double TrafficProfile::alpha(int hour, int delta_t) const {
  if (hour < 0 || hour >= kHoursPerDay) throw InputError("hour must be in [0, 24), got " + std::to_string(hour));
  BinConfig{1.0, delta_t}.validate();
  double sum = 0.0;
  for (int k = 0; k < delta_t; ++k) sum += hourly_[static_cast<std::size_t>((hour + k) % kHoursPerDay)];
  return sum / delta_t;
}

double alpha(int hour, int delta_t) {
  static const TrafficProfile profile;
  return profile.alpha(hour, delta_t);
}

double traffic_m(const TrafficTable& traffic, const TrafficProfile& profile, const LineId& line, long x_bin, int hour,
                 int delta_t) {
  const double m = traffic.count(line, x_bin);
  if (m == 0.0) return 0.0;
  return m * profile.alpha(hour, delta_t) * delta_t;
}

CellEstimate p_per_train(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                         int month, int hour, const LineId& line, double x_km) {
  check_traffic(model, traffic);
  return estimate_cell(temporal_part(model, month, hour), model, traffic, profile, line, hour,
                       x_bin_of(x_km, model.bins().delta_x));
}

// --- grid ------------------------------------------------------------------

WarningGrid::WarningGrid(Binner binner, std::vector<double> thresholds, std::vector<WarningCell> cells)
    : binner_(std::move(binner)), thresholds_(std::move(thresholds)), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end(), [](const WarningCell& a, const WarningCell& b) { return a.key < b.key; });
}

const WarningCell* WarningGrid::find(const CellKey& key) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), key,
                             [](const WarningCell& c, const CellKey& k) { return c.key < k; });
  return it != cells_.end() && it->key == key ? &*it : nullptr;
}

bool WarningGrid::has_line(const LineId& line) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), line,
                             [](const WarningCell& c, const LineId& l) { return c.key.line < l; });
  return it != cells_.end() && it->key.line == line;
}

WarningGrid bayes_warn_animals(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                               const LineId& line, int month, int hour, std::span<const double> thresholds, double x0,
                               double xf) {
  check_thresholds(thresholds);
  check_traffic(model, traffic);
  if (xf < x0) throw InputError("x0 must not exceed xf");
  const auto& bins = model.bins();
  // Rate and time profile do not depend on x; computed once for the pass.
  const auto temporal = temporal_part(model, month, hour);
  const int t_bin = hour / bins.delta_t;

  std::vector<WarningCell> cells;
  for (long b = x_bin_of(x0, bins.delta_x); b <= x_bin_of(xf, bins.delta_x); ++b)
    cells.push_back(make_cell({line, month, t_bin, b},
                              estimate_cell(temporal, model, traffic, profile, line, hour, b), thresholds));
  return WarningGrid(model.binner(), {thresholds.begin(), thresholds.end()}, std::move(cells));
}

WarningGrid sweep_all(const FittedModel& model, const TrafficTable& traffic, const TrafficProfile& profile,
                      std::span<const double> thresholds, unsigned threads) {
  check_thresholds(thresholds);
  check_traffic(model, traffic);
  const auto& bins = model.bins();
  const int hour_bins = bins.hour_bins();

  std::vector<LineSpan> spans;
  std::size_t total = 0;
  for (const auto& line : model.lines()) {
    const auto range = *model.segment_range(line);
    long first = range.first;
    long last = range.last;
    for (auto it = traffic.entries().lower_bound({line, std::numeric_limits<long>::min()});
         it != traffic.entries().end() && it->first.first == line; ++it) {
      first = std::min(first, it->first.second);
      last = std::max(last, it->first.second);
    }
    spans.push_back({line, first, last, total});
    total += static_cast<std::size_t>(last - first + 1) * kMonths * static_cast<std::size_t>(hour_bins);
  }

  std::vector<std::array<std::optional<double>, kHoursPerDay>> temporal(kMonths);
  for (int m = 1; m <= kMonths; ++m)
    for (int b = 0; b < hour_bins; ++b) temporal[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(b)] = model.temporal_part(m, b);

  std::vector<WarningCell> cells(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    auto span = std::upper_bound(spans.begin(), spans.end(), begin,
                                 [](std::size_t i, const LineSpan& s) { return i < s.offset; }) - 1;
    for (std::size_t i = begin; i < end; ++i) {
      while (std::next(span) != spans.end() && i >= std::next(span)->offset) ++span;
      const auto width = static_cast<std::size_t>(span->last - span->first + 1);
      std::size_t local = i - span->offset;
      const long x_bin = span->first + static_cast<long>(local % width);
      local /= width;
      const int t_bin = static_cast<int>(local % static_cast<std::size_t>(hour_bins));
      const int month = static_cast<int>(local / static_cast<std::size_t>(hour_bins)) + 1;
      cells[i] = make_cell({span->line, month, t_bin, x_bin},
                           estimate_cell(temporal[static_cast<std::size_t>(month - 1)][static_cast<std::size_t>(t_bin)],
                                         model, traffic, profile, span->line, t_bin * bins.delta_t, x_bin),
                           thresholds);
    }
  };

  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(1, total / 4096)));
  if (n_threads <= 1 || total == 0) {
    work(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + n_threads - 1) / n_threads;
    for (std::size_t begin = 0; begin < total; begin += chunk)
      pool.emplace_back(work, begin, std::min(total, begin + chunk));
  }
  return WarningGrid(model.binner(), {thresholds.begin(), thresholds.end()}, std::move(cells));
}

std::map<AllYearKey, std::vector<bool>> aggregate_all_year(const WarningGrid& grid) {
  std::map<AllYearKey, std::vector<bool>> out;
  for (const auto& cell : grid.cells()) {
    auto& flags = out[{cell.key.line, cell.key.t_bin, cell.key.x_bin}];
    flags.resize(cell.warned.size(), false);
    for (std::size_t i = 0; i < cell.warned.size(); ++i) flags[i] = flags[i] || cell.warned[i];
  }
  return out;
}

std::map<std::pair<LineId, int>, std::vector<std::size_t>> warned_summary(const WarningGrid& grid) {
  std::map<std::pair<LineId, int>, std::vector<std::size_t>> out;
  for (const auto& cell : grid.cells()) {
    auto& counts = out[{cell.key.line, cell.key.month}];
    counts.resize(grid.thresholds().size(), 0);
    for (std::size_t i = 0; i < cell.warned.size(); ++i) counts[i] += cell.warned[i];
  }
  return out;
}

}  // namespace wildwarn
