#include "wildwarn/export.hpp"

#include "wildwarn/csv.hpp"

namespace wildwarn {

using nlohmann::json;

namespace {

std::string flags_text(const CellFlags& f) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ';';
    s += name;
  };
  add(f.no_traffic, "no_traffic");
  add(f.insufficient_data, "insufficient_data");
  add(f.exceeds_unity, "exceeds_unity");
  return s;
}

void threshold_columns(std::ostream& out, std::span<const double> thresholds) {
  for (double t : thresholds) out << ",warned@" << csv::format_double(t);
  out << '\n';
}

json ring(const std::vector<GeoPoint>& pts) {
  json coords = json::array();
  for (const auto& p : pts) coords.push_back({p.lon, p.lat});
  return coords;
}

}  // namespace

void write_warnings_csv(std::ostream& out, const WarningGrid& grid) {
  const double dx = grid.bins().delta_x;
  const int dt = grid.bins().delta_t;
  out << "line,x_from,x_to,month,hour_from,hour_to,m_window,p_pt,flags";
  threshold_columns(out, grid.thresholds());
  for (const auto& c : grid.cells()) {
    const double x = static_cast<double>(c.key.x_bin) * dx;
    out << csv::escape(c.key.line) << ',' << csv::format_double(x) << ',' << csv::format_double(x + dx) << ','
        << c.key.month << ',' << c.key.t_bin * dt << ',' << (c.key.t_bin + 1) * dt << ','
        << csv::format_double(c.estimate.m_window) << ','
        << (c.estimate.p_pt ? csv::format_double(*c.estimate.p_pt) : "") << ',' << flags_text(c.estimate.flags);
    for (bool w : c.warned) out << ',' << (w ? 1 : 0);
    out << '\n';
  }
}

void write_all_year_csv(std::ostream& out, const WarningGrid& grid) {
  const double dx = grid.bins().delta_x;
  const int dt = grid.bins().delta_t;
  out << "line,x_from,x_to,hour_from,hour_to";
  threshold_columns(out, grid.thresholds());
  for (const auto& [key, warned] : aggregate_all_year(grid)) {
    const double x = static_cast<double>(key.x_bin) * dx;
    out << csv::escape(key.line) << ',' << csv::format_double(x) << ',' << csv::format_double(x + dx) << ','
        << key.t_bin * dt << ',' << (key.t_bin + 1) * dt;
    for (bool w : warned) out << ',' << (w ? 1 : 0);
    out << '\n';
  }
}

json warnings_geojson(const WarningGrid& grid, const std::map<LineId, LineGeometry>& geoms) {
  const double dx = grid.bins().delta_x;
  const int dt = grid.bins().delta_t;
  const auto thresholds = grid.thresholds();
  json features = json::array();
  for (const auto& c : grid.cells()) {
    if (c.warned.empty() || !c.warned.front()) continue;
    const auto g = geoms.find(c.key.line);
    if (g == geoms.end()) continue;
    const double x = static_cast<double>(c.key.x_bin) * dx;
    const auto pts = trace(g->second, x, x + dx);
    if (pts.size() < 2) continue;
    json warned_at = json::array();
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (c.warned[i]) warned_at.push_back(thresholds[i]);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", ring(pts)}}},
                        {"properties",
                         {{"line", c.key.line},
                          {"x_from", x},
                          {"x_to", x + dx},
                          {"month", c.key.month},
                          {"hour_from", c.key.t_bin * dt},
                          {"hour_to", (c.key.t_bin + 1) * dt},
                          {"m_window", c.estimate.m_window},
                          {"p_pt", *c.estimate.p_pt},
                          {"level", warned_at.size()},
                          {"warned_at", warned_at}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

json hexgrid_geojson(const HexGrid& grid) {
  json features = json::array();
  for (const auto& [idx, count] : grid.cells) {
    const auto [cx, cy] = hex_center(idx, grid.spacing);
    const auto center = grid.projection.to_geo(cx, cy);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring(grid.outline(idx))})}}},
                        {"properties",
                         {{"q", idx.q}, {"r", idx.r}, {"count", count}, {"center", {center.lon, center.lat}}}}});
  }
  return {{"type", "FeatureCollection"}, {"spacing_km", grid.spacing}, {"features", features}};
}

json correlation_json(const CorrelationReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"line", p.line},
                     {"x_from", p.x_from},
                     {"speed", p.speed},
                     {"accidents", p.accidents},
                     {"trains", p.trains},
                     {"rate", p.rate}});
  return {{"n", report.n}, {"pearson", report.pearson}, {"spearman", report.spearman}, {"pairs", pairs}};
}

json eval_json(const EvalReport& report) {
  json curve = json::array();
  for (const auto& p : report.curve)
    curve.push_back({{"theta", p.theta},
                     {"hits", p.hits},
                     {"mappable", p.mappable},
                     {"hit_rate", p.hit_rate},
                     {"warned_cells", p.warned_cells},
                     {"traffic_cells", p.traffic_cells},
                     {"warned_fraction", p.warned_fraction},
                     {"warned_traffic_fraction", p.warned_traffic_fraction}});
  return {{"n_test", report.n_test}, {"unmapped", report.unmapped}, {"relaxed", report.relaxed}, {"curve", curve}};
}

void write_species_csv(std::ostream& out, const std::vector<std::pair<std::string, std::size_t>>& profile) {
  out << "species,count\n";
  for (const auto& [species, n] : profile) out << csv::escape(species) << ',' << n << '\n';
}

void write_hourly_csv(std::ostream& out, const std::vector<std::array<std::size_t, kHoursPerDay>>& profile,
                      const SeasonScheme& seasons) {
  out << "season,hour,count\n";
  for (std::size_t i = 0; i < profile.size(); ++i)
    for (int h = 0; h < kHoursPerDay; ++h)
      out << csv::escape(seasons.seasons()[i].label) << ',' << h << ',' << profile[i][static_cast<std::size_t>(h)] << '\n';
}

}  // namespace wildwarn
