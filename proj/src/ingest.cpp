#include "wildwarn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"

namespace wildwarn {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_or_throw(const std::string& line, std::size_t row) {
  auto fields = csv::split_row(line);
  if (!fields) throw ParseError(row, "unterminated quoted field");
  return std::move(*fields);
}

bool header_matches(const std::vector<std::string>& fields,
                    std::initializer_list<std::string_view> expected) {
  if (fields.size() != expected.size()) return false;
  auto it = expected.begin();
  for (const auto& f : fields)
    if (lower(f) != *it++) return false;
  return true;
}

void check_record(const AccidentRecord& r) {
  if (!is_valid(r.date)) throw InputError("invalid calendar date " + to_string(r.date));
  if (r.minutes < 0 || r.minutes >= 24 * 60) throw InputError("time of day out of range");
  if (!(r.km >= 0.0) || !std::isfinite(r.km)) throw InputError("km must be a non-negative number");
  if (r.line.empty()) throw InputError("empty line identifier");
}

struct NumberedRecord {
  AccidentRecord record;
  std::size_t row;
  std::string text;
};

std::vector<NumberedRecord> read_accident_rows(std::istream& in) {
  csv::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw InputError("accidents file is empty");
  if (!header_matches(split_or_throw(line, reader.line_number()),
                      {"date", "time", "line", "km", "species"}))
    throw ParseError(reader.line_number(), "expected header 'date,time,line,km,species'");

  std::vector<NumberedRecord> rows;
  while (reader.next(line)) {
    const std::size_t row = reader.line_number();
    const auto f = split_or_throw(line, row);
    if (f.size() != 5)
      throw ParseError(row, "expected 5 fields, found " + std::to_string(f.size()));

    AccidentRecord r;
    const auto date = parse_date(f[0]);
    if (!date) throw ParseError(row, "invalid calendar date '" + f[0] + "'");
    r.date = *date;
    const auto minutes = parse_time_of_day(f[1]);
    if (!minutes) throw ParseError(row, "invalid time '" + f[1] + "' (expected HH:MM)");
    r.minutes = *minutes;
    r.line = f[2];
    if (r.line.empty()) throw ParseError(row, "empty line identifier");
    const auto km = csv::parse_double(f[3]);
    if (!km || *km < 0.0) throw ParseError(row, "invalid km '" + f[3] + "'");
    r.km = *km;
    r.species = f[4];
    rows.push_back({std::move(r), row, line});
  }
  if (rows.empty()) throw InputError("accidents file has no records");
  return rows;
}

Dataset to_dataset(std::vector<NumberedRecord> rows, const Period& period) {
  std::vector<AccidentRecord> records;
  records.reserve(rows.size());
  for (auto& nr : rows) {
    if (!period.contains(nr.record.date))
      throw ParseError(nr.row, "record outside period " + to_string(period.start) + ".." +
                                   to_string(period.end) + ": " + nr.text);
    records.push_back(std::move(nr.record));
  }
  return Dataset(std::move(records), period);
}

}  // namespace

Dataset::Dataset(std::vector<AccidentRecord> records, Period period)
    : records_(std::move(records)), period_(period) {
  if (!is_valid(period_.start) || !is_valid(period_.end) || period_.end < period_.start)
    throw InputError("invalid period " + to_string(period_.start) + ".." + to_string(period_.end));
  for (const auto& r : records_) {
    check_record(r);
    if (!period_.contains(r.date))
      throw InputError("record dated " + to_string(r.date) + " lies outside the period");
  }
}

double Dataset::total_days(DayCount count) const {
  const long days = days_inclusive(period_.start, period_.end);
  if (count == DayCount::fixed_365) return static_cast<double>(days - leap_days_inclusive(period_.start, period_.end));
  return static_cast<double>(days);
}

std::optional<int> parse_time_of_day(std::string_view text) {
  text = csv::trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2 || text.size() - colon != 3)
    return std::nullopt;
  int h = 0, m = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i == colon) continue;
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    (i < colon ? h : m) = (i < colon ? h : m) * 10 + (text[i] - '0');
  }
  if (h > 23 || m > 59) return std::nullopt;
  return h * 60 + m;
}

std::string format_time_of_day(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

Period parse_period(std::string_view text) {
  const auto sep = text.find(':');
  if (sep == std::string_view::npos) throw InputError("period must look like YYYY-MM-DD:YYYY-MM-DD");
  const auto a = parse_date(csv::trim(text.substr(0, sep)));
  const auto b = parse_date(csv::trim(text.substr(sep + 1)));
  if (!a || !b) throw InputError("invalid date in period '" + std::string(text) + "'");
  if (*b < *a) throw InputError("period end precedes its start");
  return {*a, *b};
}

Dataset parse_accidents(std::istream& in, const Period& period) {
  return to_dataset(read_accident_rows(in), period);
}

Dataset parse_accidents(std::istream& in) {
  auto rows = read_accident_rows(in);
  int first = rows.front().record.date.year;
  int last = first;
  for (const auto& nr : rows) {
    first = std::min(first, nr.record.date.year);
    last = std::max(last, nr.record.date.year);
  }
  return to_dataset(std::move(rows), Period{{first, 1, 1}, {last, 12, 31}});
}

void write_accidents(std::ostream& out, const Dataset& data) {
  out << "date,time,line,km,species\n";
  for (const auto& r : data.records())
    out << to_string(r.date) << ',' << format_time_of_day(r.minutes) << ',' << csv::escape(r.line)
        << ',' << csv::format_double(r.km) << ',' << csv::escape(r.species) << '\n';
}

TrafficTable::TrafficTable(double delta_x) : delta_x_(delta_x) {
  if (!(delta_x > 0.0)) throw InputError("delta_x must be positive");
}

double TrafficTable::count(const LineId& line, long bin) const {
  auto it = entries_.find({line, bin});
  return it == entries_.end() ? 0.0 : it->second;
}

void TrafficTable::set(const LineId& line, long bin, double trains) {
  if (!(trains >= 0.0) || !std::isfinite(trains)) throw InputError("train count must be non-negative");
  entries_[{line, bin}] = trains;
}

void TrafficTable::add(const LineId& line, long bin, double trains) {
  set(line, bin, count(line, bin) + trains);
}

std::vector<LineId> TrafficTable::lines() const {
  std::vector<LineId> out;
  for (const auto& [key, _] : entries_)
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  return out;
}

TrafficTable aggregate_runs(std::span<const TrainRun> runs, double delta_x) {
  TrafficTable table(delta_x);
  for (const auto& run : runs) {
    const double lo = std::min(run.km_from, run.km_to);
    const double hi = std::max(run.km_from, run.km_to);
    if (hi <= lo) continue;
    const long first = x_bin_of(lo, delta_x);
    const long last = x_bin_of(hi, delta_x) - (is_aligned(hi, delta_x) ? 1 : 0);
    for (long b = first; b <= last; ++b) table.add(run.line, b, 1.0);
  }
  return table;
}

TrafficTable parse_traffic(std::istream& in, double delta_x) {
  csv::LineReader reader(in);
  std::string line;
  TrafficTable table(delta_x);
  if (!reader.next(line)) return table;

  const auto header = split_or_throw(line, reader.line_number());
  const bool runs_format = header_matches(header, {"line", "km_from", "km_to", "departure"});
  if (!runs_format && !header_matches(header, {"line", "km_from", "count"}))
    throw ParseError(reader.line_number(),
                     "expected header 'line,km_from,count' or 'line,km_from,km_to,departure'");

  std::vector<TrainRun> runs;
  while (reader.next(line)) {
    const std::size_t row = reader.line_number();
    const auto f = split_or_throw(line, row);
    if (f.size() != header.size())
      throw ParseError(row, "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(row, "empty line identifier");
    const auto km_from = csv::parse_double(f[1]);
    if (!km_from || *km_from < 0.0) throw ParseError(row, "invalid km_from '" + f[1] + "'");

    if (runs_format) {
      const auto km_to = csv::parse_double(f[2]);
      if (!km_to || *km_to < 0.0) throw ParseError(row, "invalid km_to '" + f[2] + "'");
      const auto dep = parse_time_of_day(f[3]);
      if (!dep) throw ParseError(row, "invalid departure '" + f[3] + "'");
      runs.push_back({f[0], *km_from, *km_to, *dep});
      continue;
    }

    if (!is_aligned(*km_from, delta_x))
      throw ParseError(row, "km_from " + f[1] + " is not a multiple of delta_x " +
                                csv::format_double(delta_x));
    const auto count = csv::parse_double(f[2]);
    if (!count) throw ParseError(row, "invalid count '" + f[2] + "'");
    if (*count < 0.0) throw ParseError(row, "negative train count " + f[2]);
    const long bin = x_bin_of(*km_from, delta_x);
    if (table.entries().count({f[0], bin}))
      throw ParseError(row, "duplicate entry for line " + f[0] + " km " + f[1]);
    table.set(f[0], bin, *count);
  }
  return runs_format ? aggregate_runs(runs, delta_x) : table;
}

SpeedProfile::SpeedProfile(LineId line, std::vector<SpeedInterval> intervals)
    : line_(std::move(line)), intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end(),
            [](const SpeedInterval& a, const SpeedInterval& b) { return a.km_from < b.km_from; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!(iv.km_from < iv.km_to)) throw InputError("speed interval on line " + line_ + " has km_from >= km_to");
    if (!(iv.vmax > 0.0)) throw InputError("speed on line " + line_ + " must be positive");
    if (i > 0 && iv.km_from < intervals_[i - 1].km_to)
      throw InputError("overlapping speed intervals on line " + line_);
  }
}

std::optional<double> SpeedProfile::speed_at(double km) const {
  std::optional<double> best;
  for (const auto& iv : intervals_)
    if (iv.km_from <= km && km <= iv.km_to) best = std::max(best.value_or(0.0), iv.vmax);
  return best;
}

std::map<LineId, SpeedProfile> parse_speeds(std::istream& in) {
  csv::LineReader reader(in);
  std::string line;
  std::map<LineId, SpeedProfile> out;
  if (!reader.next(line)) return out;
  if (!header_matches(split_or_throw(line, reader.line_number()), {"line", "km_from", "km_to", "vmax"}))
    throw ParseError(reader.line_number(), "expected header 'line,km_from,km_to,vmax'");

  std::map<LineId, std::vector<SpeedInterval>> grouped;
  while (reader.next(line)) {
    const std::size_t row = reader.line_number();
    const auto f = split_or_throw(line, row);
    if (f.size() != 4) throw ParseError(row, "expected 4 fields, found " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(row, "empty line identifier");
    const auto a = csv::parse_double(f[1]);
    const auto b = csv::parse_double(f[2]);
    const auto v = csv::parse_double(f[3]);
    if (!a || !b || !v) throw ParseError(row, "invalid number");
    if (!(*a < *b)) throw ParseError(row, "km_from must be below km_to");
    if (!(*v > 0.0)) throw ParseError(row, "vmax must be positive");
    grouped[f[0]].push_back({*a, *b, *v});
  }
  for (auto& [id, ivs] : grouped) out.emplace(id, SpeedProfile(id, std::move(ivs)));
  return out;
}

}  // namespace wildwarn
