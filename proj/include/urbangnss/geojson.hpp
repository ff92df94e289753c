#pragma once

#include <json.hpp>
#include <string>

#include "urbangnss/region2d.hpp"

namespace urbangnss {

/// GeoJSON MultiPolygon geometry, local metric coordinates, closed rings.
nlohmann::json toGeoJSONGeometry(const Region2D& r);

/// Feature wrapping toGeoJSONGeometry with the given properties object.
nlohmann::json toGeoJSONFeature(const Region2D& r, nlohmann::json properties);

/// Inverse of toGeoJSONGeometry (accepts Polygon or MultiPolygon).
Region2D fromGeoJSONGeometry(const nlohmann::json& g);

}  // namespace urbangnss
