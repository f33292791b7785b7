#include "wildwarn/hexgrid.hpp"

#include <cmath>
#include <numbers>

#include "wildwarn/errors.hpp"

namespace wildwarn {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

LocalProjection::LocalProjection(GeoPoint origin) : origin_(origin), cos_lat_(std::cos(origin.lat * kDeg)) {}

std::pair<double, double> LocalProjection::to_local(const GeoPoint& p) const {
  return {kEarthRadiusKm * (p.lon - origin_.lon) * kDeg * cos_lat_, kEarthRadiusKm * (p.lat - origin_.lat) * kDeg};
}

GeoPoint LocalProjection::to_geo(double x_km, double y_km) const {
  return {origin_.lat + y_km / kEarthRadiusKm / kDeg, origin_.lon + x_km / (kEarthRadiusKm * cos_lat_) / kDeg};
}

HexIndex hex_at(double x_km, double y_km, double spacing) {
  if (!(spacing > 0.0)) throw InputError("hex spacing must be positive");
  const double size = spacing / kSqrt3;
  const double q = (2.0 / 3.0 * x_km) / size;
  const double r = (-1.0 / 3.0 * x_km + kSqrt3 / 3.0 * y_km) / size;
  // Cube rounding: round all three, then fix the coordinate with the largest error.
  const double s = -q - r;
  double rq = std::round(q);
  double rr = std::round(r);
  const double rs = std::round(s);
  const double dq = std::fabs(rq - q);
  const double dr = std::fabs(rr - r);
  const double ds = std::fabs(rs - s);
  if (dq > dr && dq > ds)
    rq = -rr - rs;
  else if (dr > ds)
    rr = -rq - rs;
  return {static_cast<long>(rq), static_cast<long>(rr)};
}

std::pair<double, double> hex_center(const HexIndex& h, double spacing) {
  const double size = spacing / kSqrt3;
  return {size * 1.5 * static_cast<double>(h.q),
          size * kSqrt3 * (static_cast<double>(h.r) + static_cast<double>(h.q) / 2.0)};
}

std::size_t HexGrid::total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : cells) n += c;
  return n;
}

std::vector<GeoPoint> HexGrid::outline(const HexIndex& h) const {
  const auto [cx, cy] = hex_center(h, spacing);
  const double size = spacing / kSqrt3;
  std::vector<GeoPoint> ring;
  for (int k = 0; k <= 6; ++k) {
    const double a = (k % 6) * 60.0 * kDeg;
    ring.push_back(projection.to_geo(cx + size * std::cos(a), cy + size * std::sin(a)));
  }
  return ring;
}

HexGrid hex_bin(std::span<const GeoPoint> points, double spacing) {
  if (!(spacing > 0.0)) throw InputError("hex spacing must be positive");
  HexGrid grid;
  grid.spacing = spacing;
  if (points.empty()) return grid;
  GeoPoint centroid;
  for (const auto& p : points) {
    centroid.lat += p.lat;
    centroid.lon += p.lon;
  }
  centroid.lat /= static_cast<double>(points.size());
  centroid.lon /= static_cast<double>(points.size());
  grid.projection = LocalProjection(centroid);
  for (const auto& p : points) {
    const auto [x, y] = grid.projection.to_local(p);
    ++grid.cells[hex_at(x, y, spacing)];
  }
  return grid;
}

}  // namespace wildwarn
