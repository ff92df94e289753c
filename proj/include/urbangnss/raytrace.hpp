#pragma once

#include <optional>
#include <span>

#include "urbangnss/citymodel.hpp"

namespace urbangnss {

/// Moller-Trumbore: parameter t of the hit along o + t*d, if any. Hits on
/// triangle edges count (closed triangle).
std::optional<double> rayTriangle(const Vec3& o, const Vec3& d, const Triangle& t);

/// Slab test of the segment from->to against an axis-aligned box.
bool segmentHitsBox(const Vec3& from, const Vec3& to, const Vec3& lo, const Vec3& hi);

/// True when some building triangle crosses the segment from->to, ignoring
/// hits within `clearance` meters of either endpoint. Triangles of plane
/// `skipPlane` of building `skipBuilding` are ignored.
bool segmentBlocked(const CityModel& city, const Vec3& from, const Vec3& to, double clearance = 1e-6,
                    int skipBuilding = -1, int skipPlane = -1);

}  // namespace urbangnss
