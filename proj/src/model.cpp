#include "wildwarn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"

namespace wildwarn {

namespace {

void check_month(int month) {
  if (month < 1 || month > kMonths) throw InputError("month must be in 1..12, got " + std::to_string(month));
}

int hour_to_bin(int hour, int delta_t) {
  if (hour < 0 || hour >= kHoursPerDay) throw InputError("hour must be in [0, 24), got " + std::to_string(hour));
  if (hour % delta_t != 0)
    throw InputError("hour " + std::to_string(hour) + " is not a multiple of delta_t " + std::to_string(delta_t));
  return hour / delta_t;
}

std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

// --- SeasonScheme ----------------------------------------------------------

SeasonScheme::SeasonScheme()
    : SeasonScheme({{"short_daylight", {11, 12, 1, 2}},
                    {"long_daylight", {5, 6, 7, 8}},
                    {"intermediate", {3, 4, 9, 10}}}) {}

SeasonScheme::SeasonScheme(std::vector<Season> seasons) : seasons_(std::move(seasons)) {
  std::array<int, kMonths> seen{};
  for (std::size_t i = 0; i < seasons_.size(); ++i) {
    if (seasons_[i].months.empty()) throw InputError("season '" + seasons_[i].label + "' has no months");
    for (int m : seasons_[i].months) {
      check_month(m);
      if (seen[static_cast<std::size_t>(m - 1)]++)
        throw InputError("month " + std::to_string(m) + " appears in more than one season");
      month_to_season_[static_cast<std::size_t>(m - 1)] = i;
    }
  }
  for (int m = 1; m <= kMonths; ++m)
    if (!seen[static_cast<std::size_t>(m - 1)])
      throw InputError("month " + std::to_string(m) + " is not assigned to any season");
}

SeasonScheme SeasonScheme::parse(std::string_view text) {
  std::vector<Season> seasons;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(';', start), text.size());
    auto part = csv::trim(text.substr(start, end - start));
    start = end + 1;
    if (part.empty()) continue;
    Season s;
    if (const auto eq = part.find('='); eq != std::string_view::npos) {
      s.label = std::string(csv::trim(part.substr(0, eq)));
      part = part.substr(eq + 1);
    } else {
      s.label = "season" + std::to_string(seasons.size() + 1);
    }
    std::size_t p = 0;
    while (p <= part.size()) {
      const auto q = std::min(part.find(',', p), part.size());
      const auto tok = csv::trim(part.substr(p, q - p));
      p = q + 1;
      const auto v = csv::parse_double(tok);
      if (!v || *v != std::floor(*v)) throw InputError("bad month '" + std::string(tok) + "' in season spec");
      s.months.push_back(static_cast<int>(*v));
    }
    seasons.push_back(std::move(s));
  }
  return SeasonScheme(std::move(seasons));
}

std::string SeasonScheme::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < seasons_.size(); ++i) {
    if (i) os << ';';
    os << seasons_[i].label << '=';
    for (std::size_t k = 0; k < seasons_[i].months.size(); ++k) os << (k ? "," : "") << seasons_[i].months[k];
  }
  return os.str();
}

// --- FittedModel -----------------------------------------------------------

FittedModel::FittedModel(ModelCounts counts, SeasonScheme seasons, Binner binner, DayCount day_count,
                         double smoothing, Period period)
    : counts_(std::move(counts)),
      seasons_(std::move(seasons)),
      binner_(std::move(binner)),
      day_count_(day_count),
      smoothing_(smoothing),
      period_(period) {
  if (!(smoothing_ >= 0.0) || !std::isfinite(smoothing_)) throw InputError("smoothing must be >= 0");
  if (!(counts_.t_days > 0.0)) throw InputError("observation period must span at least one day");
  const int hour_bins = bins().hour_bins();
  if (counts_.per_season.size() != seasons_.size() || counts_.per_season_bin.size() != seasons_.size())
    throw InputError("season counts do not match the season scheme");
  for (const auto& row : counts_.per_season_bin)
    if (row.size() != static_cast<std::size_t>(hour_bins))
      throw InputError("hour-bin counts do not match delta_t");

  const double days_per_month = counts_.t_days / kMonths;
  for (std::size_t m = 0; m < kMonths; ++m) mu_[m] = static_cast<double>(counts_.per_month[m]) / days_per_month;

  const double s = smoothing_;
  p_time_.resize(seasons_.size());
  for (std::size_t i = 0; i < seasons_.size(); ++i) {
    const double den = static_cast<double>(counts_.per_season[i]) + s * hour_bins;
    for (int b = 0; b < hour_bins; ++b)
      p_time_[i].push_back(ratio(static_cast<double>(counts_.per_season_bin[i][static_cast<std::size_t>(b)]) + s, den));
  }

  const double line_den = static_cast<double>(counts_.n) + s * static_cast<double>(counts_.per_line.size());
  for (const auto& [line, n_l] : counts_.per_line) {
    p_line_[line] = line_den > 0.0 ? (static_cast<double>(n_l) + s) / line_den : 0.0;

    SegmentRange range{0, 0};
    const auto seg = counts_.per_segment.find(line);
    if (seg != counts_.per_segment.end() && !seg->second.empty()) {
      range.first = seg->second.begin()->first;
      range.last = seg->second.rbegin()->first;
    }
    if (auto end = binner_.line_ends().find(line); end != binner_.line_ends().end()) {
      const long end_bin = binner_.x_bin(line, end->second);
      range.last = std::max(range.last, end_bin);
    }
    ranges_[line] = range;

    const auto width = static_cast<std::size_t>(range.last - range.first + 1);
    const double den = static_cast<double>(n_l) + s * static_cast<double>(width);
    std::vector<double> probs(width, 0.0);
    for (std::size_t k = 0; k < width; ++k) {
      long c = 0;
      if (seg != counts_.per_segment.end())
        if (auto it = seg->second.find(range.first + static_cast<long>(k)); it != seg->second.end()) c = it->second;
      probs[k] = den > 0.0 ? (static_cast<double>(c) + s) / den : 0.0;
    }
    p_segment_[line] = std::move(probs);
  }
}

std::optional<double> FittedModel::p_time(int month, int t_bin) const {
  check_month(month);
  const auto& row = p_time_.at(seasons_.index_of(month));
  if (t_bin < 0 || t_bin >= static_cast<int>(row.size())) throw InputError("hour bin out of range");
  return row[static_cast<std::size_t>(t_bin)];
}

double FittedModel::p_line(const LineId& line) const {
  auto it = p_line_.find(line);
  return it == p_line_.end() ? 0.0 : it->second;
}

std::optional<double> FittedModel::p_segment(const LineId& line, long x_bin) const {
  auto it = p_segment_.find(line);
  if (it == p_segment_.end()) return std::nullopt;
  const auto& range = ranges_.at(line);
  if (x_bin < range.first || x_bin > range.last) return 0.0;
  return it->second[static_cast<std::size_t>(x_bin - range.first)];
}

std::optional<double> FittedModel::spatial_part(const LineId& line, long x_bin) const {
  const double pl = p_line(line);
  if (pl == 0.0) return 0.0;
  const auto ps = p_segment(line, x_bin);
  if (!ps) return std::nullopt;
  return *ps * pl;
}

std::optional<double> FittedModel::temporal_part(int month, int t_bin) const {
  const double rate = mu(month);
  const auto pt = p_time(month, t_bin);
  if (rate == 0.0) return 0.0;
  if (!pt) return std::nullopt;
  return *pt * rate;
}

std::vector<LineId> FittedModel::lines() const {
  std::vector<LineId> out;
  for (const auto& [line, _] : counts_.per_line) out.push_back(line);
  return out;
}

std::optional<SegmentRange> FittedModel::segment_range(const LineId& line) const {
  auto it = ranges_.find(line);
  if (it == ranges_.end()) return std::nullopt;
  return it->second;
}

// --- fitting ---------------------------------------------------------------

FittedModel fit(const Dataset& data, const SeasonScheme& seasons, const BinConfig& bins,
                const FitOptions& options) {
  if (data.empty()) throw InputError("no accidents to fit");
  const Binner binner(bins, options.line_ends);

  ModelCounts c;
  c.n = static_cast<long>(data.size());
  c.t_days = data.total_days(options.day_count);
  c.per_season.assign(seasons.size(), 0);
  c.per_season_bin.assign(seasons.size(), std::vector<long>(static_cast<std::size_t>(bins.hour_bins()), 0));

  for (const auto& r : data.records()) {
    const std::size_t season = seasons.index_of(r.month());
    ++c.per_month[static_cast<std::size_t>(r.month() - 1)];
    ++c.per_season[season];
    ++c.per_season_bin[season][static_cast<std::size_t>(binner.t_bin(r.minutes))];
    ++c.per_line[r.line];
    ++c.per_segment[r.line][binner.x_bin(r.line, r.km)];
  }
  return FittedModel(std::move(c), seasons, binner, options.day_count, options.smoothing, data.period());
}

double estimate_mu(const Dataset& data, int month, DayCount day_count) {
  check_month(month);
  const double t = data.total_days(day_count);
  long n_tau = 0;
  for (const auto& r : data.records()) n_tau += r.month() == month;
  return static_cast<double>(n_tau) / (t / kMonths);
}

std::optional<double> estimate_p_time(const Dataset& data, const SeasonScheme& seasons, int month, int hour,
                                      int delta_t) {
  check_month(month);
  BinConfig{1.0, delta_t}.validate();
  const int lo = hour_to_bin(hour, delta_t) * delta_t;
  const std::size_t season = seasons.index_of(month);
  long in_season = 0;
  long in_window = 0;
  for (const auto& r : data.records()) {
    if (seasons.index_of(r.month()) != season) continue;
    ++in_season;
    in_window += r.hour() >= lo && r.hour() < lo + delta_t;
  }
  return ratio(static_cast<double>(in_window), static_cast<double>(in_season));
}

double estimate_p_line(const Dataset& data, const LineId& line) {
  if (data.empty()) throw InputError("no accidents");
  long n_l = 0;
  for (const auto& r : data.records()) n_l += r.line == line;
  return static_cast<double>(n_l) / static_cast<double>(data.size());
}

std::optional<double> estimate_p_segment(const Dataset& data, const LineId& line, double x_km, double delta_x) {
  BinConfig{delta_x, 1}.validate();
  const long bin = x_bin_of(x_km, delta_x);
  long n_l = 0;
  long in_bin = 0;
  for (const auto& r : data.records()) {
    if (r.line != line) continue;
    ++n_l;
    in_bin += x_bin_of(r.km, delta_x) == bin;
  }
  return ratio(static_cast<double>(in_bin), static_cast<double>(n_l));
}

std::optional<double> spatial_part(const FittedModel& model, const LineId& line, double x_km) {
  return model.spatial_part(line, x_bin_of(x_km, model.bins().delta_x));
}

std::optional<double> temporal_part(const FittedModel& model, int month, int hour) {
  return model.temporal_part(month, hour_to_bin(hour, model.bins().delta_t));
}

}  // namespace wildwarn
