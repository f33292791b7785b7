#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "wildwarn/analysis.hpp"
#include "wildwarn/geometry.hpp"
#include "wildwarn/hexgrid.hpp"
#include "wildwarn/warn.hpp"

namespace wildwarn {

/// `line,x_from,x_to,month,hour_from,hour_to,m_window,p_pt,flags,warned@<theta>...`
/// `flags` is a `;`-joined subset of no_traffic, insufficient_data, exceeds_unity.
void write_warnings_csv(std::ostream& out, const WarningGrid& grid);

/// Month-aggregated warnings: `line,x_from,x_to,hour_from,hour_to,warned@<theta>...`
void write_all_year_csv(std::ostream& out, const WarningGrid& grid);

/// Cells warned at the lowest threshold as LineString features traced along
/// the line geometry. Lines without geometry are skipped.
nlohmann::json warnings_geojson(const WarningGrid& grid, const std::map<LineId, LineGeometry>& geoms);

/// One Polygon feature per occupied hexagon with a `count` property.
nlohmann::json hexgrid_geojson(const HexGrid& grid);

/// {n, pearson, spearman, pairs}
nlohmann::json correlation_json(const CorrelationReport& report);

nlohmann::json eval_json(const EvalReport& report);

void write_species_csv(std::ostream& out, const std::vector<std::pair<std::string, std::size_t>>& profile);
void write_hourly_csv(std::ostream& out, const std::vector<std::array<std::size_t, kHoursPerDay>>& profile,
                      const SeasonScheme& seasons);

}  // namespace wildwarn
