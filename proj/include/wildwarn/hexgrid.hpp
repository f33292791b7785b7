#pragma once

#include <compare>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "wildwarn/geometry.hpp"

namespace wildwarn {

/// Local equirectangular projection (km) around an origin. Longitude is
/// scaled by cos(origin latitude).
class LocalProjection {
 public:
  static constexpr double kEarthRadiusKm = 6371.0088;

  LocalProjection() = default;
  explicit LocalProjection(GeoPoint origin);

  const GeoPoint& origin() const noexcept { return origin_; }
  std::pair<double, double> to_local(const GeoPoint& p) const;
  GeoPoint to_geo(double x_km, double y_km) const;

 private:
  GeoPoint origin_;
  double cos_lat_ = 1.0;
};

/// Axial coordinates of a flat-top hexagon.
struct HexIndex {
  long q = 0;
  long r = 0;

  auto operator<=>(const HexIndex&) const = default;
};

/// Hexagon containing the local point (x, y). `spacing` is the distance
/// between neighbouring centres, i.e. sqrt(3) times the hexagon's circumradius.
HexIndex hex_at(double x_km, double y_km, double spacing);

/// Centre of a hexagon in local km.
std::pair<double, double> hex_center(const HexIndex& h, double spacing);

struct HexGrid {
  double spacing = 2.5;
  LocalProjection projection;
  std::map<HexIndex, std::size_t> cells;

  std::size_t total() const;

  /// Six corners (closed ring, first corner repeated) in geographic coordinates.
  std::vector<GeoPoint> outline(const HexIndex& h) const;
};

/// Counts points per hexagon, projected around the points' centroid.
HexGrid hex_bin(std::span<const GeoPoint> points, double spacing = 2.5);

}  // namespace wildwarn
