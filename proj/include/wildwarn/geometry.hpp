#pragma once

#include <istream>
#include <map>
#include <span>
#include <vector>

#include "wildwarn/binning.hpp"

namespace wildwarn {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

struct CalibratedVertex {
  double lat = 0.0;
  double lon = 0.0;
  double km = 0.0;
};

/// Polyline of a railway line with a kilometre-post calibration per vertex.
class LineGeometry {
 public:
  /// Requires at least two vertices with strictly increasing km.
  LineGeometry(LineId line, std::vector<CalibratedVertex> vertices);

  const LineId& line() const noexcept { return line_; }
  std::span<const CalibratedVertex> vertices() const noexcept { return vertices_; }
  double first_km() const noexcept { return vertices_.front().km; }
  double last_km() const noexcept { return vertices_.back().km; }
  bool covers(double km) const noexcept { return first_km() <= km && km <= last_km(); }

 private:
  LineId line_;
  std::vector<CalibratedVertex> vertices_;
};

/// Linear referencing: interpolates latitude and longitude between the two
/// vertices bracketing `km`. Throws InputError outside the calibrated range.
GeoPoint km_to_geo(const LineGeometry& geom, double km);

/// Points tracing the line from km `from` to km `to` (both clipped to the
/// calibrated range), including every interior vertex. Empty when the clipped
/// span is empty.
std::vector<GeoPoint> trace(const LineGeometry& geom, double from, double to);

/// Reads a GeoJSON FeatureCollection of LineStrings. Each feature needs
/// `properties.line` and a `properties.km` array parallel to the coordinates.
std::map<LineId, LineGeometry> parse_line_geometry(std::istream& in);

/// Largest calibrated km per line, usable as line ends for binning.
std::map<LineId, double> line_ends(const std::map<LineId, LineGeometry>& geoms);

}  // namespace wildwarn
