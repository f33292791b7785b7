#include "wildwarn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "wildwarn/csv.hpp"
#include "wildwarn/errors.hpp"

namespace wildwarn {

using nlohmann::json;

LineGeometry::LineGeometry(LineId line, std::vector<CalibratedVertex> vertices)
    : line_(std::move(line)), vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw InputError("line " + line_ + " geometry needs at least 2 vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& v = vertices_[i];
    if (!std::isfinite(v.lat) || !std::isfinite(v.lon) || !std::isfinite(v.km))
      throw InputError("line " + line_ + " geometry has a non-finite coordinate");
    if (i > 0 && !(v.km > vertices_[i - 1].km))
      throw InputError("line " + line_ + " km calibration must increase strictly along the vertices");
  }
}

GeoPoint km_to_geo(const LineGeometry& geom, double km) {
  if (!geom.covers(km))
    throw InputError("km " + csv::format_double(km) + " outside calibrated range of line " + geom.line() +
                     " [" + csv::format_double(geom.first_km()) + ", " +
                     csv::format_double(geom.last_km()) + "]");
  const auto v = geom.vertices();
  // First vertex with km >= target; the segment ends there.
  auto hi = std::lower_bound(v.begin(), v.end(), km,
                             [](const CalibratedVertex& a, double k) { return a.km < k; });
  if (hi->km == km) return {hi->lat, hi->lon};
  const auto lo = hi - 1;
  const double f = (km - lo->km) / (hi->km - lo->km);
  return {lo->lat + f * (hi->lat - lo->lat), lo->lon + f * (hi->lon - lo->lon)};
}

std::vector<GeoPoint> trace(const LineGeometry& geom, double from, double to) {
  const double a = std::max(from, geom.first_km());
  const double b = std::min(to, geom.last_km());
  std::vector<GeoPoint> out;
  if (!(a < b)) return out;
  out.push_back(km_to_geo(geom, a));
  for (const auto& v : geom.vertices())
    if (a < v.km && v.km < b) out.push_back({v.lat, v.lon});
  out.push_back(km_to_geo(geom, b));
  return out;
}

std::map<LineId, LineGeometry> parse_line_geometry(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("line geometry is not valid JSON: ") + e.what());
  }

  std::vector<json> features;
  if (doc.value("type", "") == "FeatureCollection" && doc.contains("features"))
    features = doc["features"].get<std::vector<json>>();
  else if (doc.value("type", "") == "Feature")
    features.push_back(doc);
  else
    throw InputError("line geometry must be a GeoJSON Feature or FeatureCollection");

  std::map<LineId, LineGeometry> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    const std::string where = "feature " + std::to_string(i);
    try {
      const auto& geom = f.at("geometry");
      if (geom.at("type") != "LineString") throw InputError(where + ": geometry must be a LineString");
      const auto& props = f.at("properties");
      const auto& id = props.at("line");
      const LineId line = id.is_string() ? id.get<std::string>() : id.dump();
      const auto coords = geom.at("coordinates").get<std::vector<std::vector<double>>>();
      const auto kms = props.at("km").get<std::vector<double>>();
      if (coords.size() != kms.size())
        throw InputError(where + ": km array length differs from coordinate count");
      std::vector<CalibratedVertex> verts;
      for (std::size_t k = 0; k < coords.size(); ++k) {
        if (coords[k].size() < 2) throw InputError(where + ": coordinate needs [lon, lat]");
        verts.push_back({coords[k][1], coords[k][0], kms[k]});
      }
      if (out.count(line)) throw InputError(where + ": duplicate geometry for line " + line);
      out.emplace(line, LineGeometry(line, std::move(verts)));
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return out;
}

std::map<LineId, double> line_ends(const std::map<LineId, LineGeometry>& geoms) {
  std::map<LineId, double> ends;
  for (const auto& [id, g] : geoms) ends[id] = g.last_km();
  return ends;
}

}  // namespace wildwarn
