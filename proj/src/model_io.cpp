#include "wildwarn/model_io.hpp"

#include "wildwarn/errors.hpp"

namespace wildwarn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "wildwarn-model";
constexpr int kVersion = 1;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json model_to_json(const FittedModel& model) {
  const auto& c = model.counts();
  const auto& bins = model.bins();
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["bins"] = {{"delta_x", bins.delta_x}, {"delta_t", bins.delta_t}};
  doc["day_count"] = model.day_count() == DayCount::fixed_365 ? "365" : "calendar";
  doc["smoothing"] = model.smoothing();
  doc["period"] = {{"start", to_string(model.period().start)}, {"end", to_string(model.period().end)}};

  json seasons = json::array();
  for (const auto& s : model.seasons().seasons()) seasons.push_back({{"label", s.label}, {"months", s.months}});
  doc["seasons"] = seasons;

  json ends = json::object();
  for (const auto& [line, km] : model.binner().line_ends()) ends[line] = km;
  doc["line_ends"] = ends;

  json segments = json::array();
  for (const auto& [line, by_bin] : c.per_segment)
    for (const auto& [bin, n] : by_bin)
      segments.push_back({{"line", line}, {"x_bin", bin}, {"count", n}});
  doc["counts"] = {{"n", c.n},
                   {"t_days", c.t_days},
                   {"per_month", c.per_month},
                   {"per_season", c.per_season},
                   {"per_season_bin", c.per_season_bin},
                   {"per_line", c.per_line},
                   {"per_segment", segments}};

  // Derived tables, for consumers that do not want to refit.
  json mu = json::array();
  for (int m = 1; m <= kMonths; ++m) mu.push_back(model.mu(m));
  json p_time = json::array();
  for (std::size_t i = 0; i < model.seasons().size(); ++i) {
    const int month = model.seasons().seasons()[i].months.front();
    json row = json::array();
    for (int b = 0; b < bins.hour_bins(); ++b) row.push_back(optional_number(model.p_time(month, b)));
    p_time.push_back({{"season", model.seasons().seasons()[i].label}, {"p", row}});
  }
  json p_line = json::object();
  json p_segment = json::array();
  for (const auto& line : model.lines()) {
    p_line[line] = model.p_line(line);
    const auto range = *model.segment_range(line);
    for (long b = range.first; b <= range.last; ++b)
      p_segment.push_back({{"line", line},
                           {"x_bin", b},
                           {"x_from", static_cast<double>(b) * bins.delta_x},
                           {"p", optional_number(model.p_segment(line, b))}});
  }
  doc["tables"] = {{"mu", mu}, {"p_time", p_time}, {"p_line", p_line}, {"p_segment", p_segment}};
  return doc;
}

FittedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format") != kFormat) throw InputError("not a wildwarn model file");
    if (doc.at("version") != kVersion) throw InputError("unsupported model version");

    BinConfig bins{doc.at("bins").at("delta_x").get<double>(), doc.at("bins").at("delta_t").get<int>()};
    const auto day_count = doc.at("day_count") == "365" ? DayCount::fixed_365 : DayCount::calendar;

    std::vector<Season> seasons;
    for (const auto& s : doc.at("seasons"))
      seasons.push_back({s.at("label").get<std::string>(), s.at("months").get<std::vector<int>>()});

    const auto start = parse_date(doc.at("period").at("start").get<std::string>());
    const auto end = parse_date(doc.at("period").at("end").get<std::string>());
    if (!start || !end) throw InputError("invalid model period");

    const auto& jc = doc.at("counts");
    ModelCounts c;
    c.n = jc.at("n").get<long>();
    c.t_days = jc.at("t_days").get<double>();
    c.per_month = jc.at("per_month").get<std::array<long, kMonths>>();
    c.per_season = jc.at("per_season").get<std::vector<long>>();
    c.per_season_bin = jc.at("per_season_bin").get<std::vector<std::vector<long>>>();
    c.per_line = jc.at("per_line").get<std::map<LineId, long>>();
    for (const auto& seg : jc.at("per_segment"))
      c.per_segment[seg.at("line").get<std::string>()][seg.at("x_bin").get<long>()] = seg.at("count").get<long>();

    return FittedModel(std::move(c), SeasonScheme(std::move(seasons)),
                       Binner(bins, doc.value("line_ends", json::object()).get<std::map<LineId, double>>()),
                       day_count, doc.at("smoothing").get<double>(), Period{*start, *end});
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(std::ostream& out, const FittedModel& model) { out << model_to_json(model).dump(2) << '\n'; }

FittedModel load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace wildwarn
