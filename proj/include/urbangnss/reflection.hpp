#pragma once

#include <string>
#include <vector>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/region2d.hpp"
#include "urbangnss/shadow.hpp"

namespace urbangnss {

/// A building plane that can reflect the satellite's signal onto the ground.
struct ReflectionPlane {
  std::size_t planeIndex = 0;  // into Building::planes
  Vec3 mirroredSatellite = Vec3::Zero();
  Vec3 reflectionDir = Vec3::Zero();  // unit, from the mirrored satellite through the plane vertex mean
  Vec3 losDir = Vec3::Zero();         // unit, satellite to plane center
  double incidenceAngle = 0.0;        // angle between losDir and the inward normal, radians
};

struct ReflectionPlaneSet {
  std::size_t buildingIndex = 0;
  std::vector<ReflectionPlane> planes;
};

/// s mirrored across the plane through `center` with unit normal `normal`.
Vec3 mirrorPoint(const Vec3& s, const Vec3& normal, const Vec3& center);
Vec3 mirrorSatellite(const Vec3& s, const Plane& plane);

/// Planes whose outward face is illuminated (N·(s - c) > 0) and whose
/// reflection direction points downward.
ReflectionPlaneSet findReflectionPlanes(const Building& b, std::size_t buildingIndex, const SatelliteState& s);

/// Ground footprint of the plane swept along the reflection direction.
Region2D potentialArea(const Building& b, const ReflectionPlane& rp, const std::vector<ConstrainedZonotope>& cells,
                       double eps);

/// Ground image of the plane parts lying in some shadow volume. Volumes of
/// the reflector's own plane triangles are skipped.
Region2D invisibleArea(const CityModel& city, std::size_t buildingIndex, const ReflectionPlane& rp,
                       const std::vector<CZCollection>& shadowVolumes, const std::vector<ConstrainedZonotope>& cells,
                       double eps);

/// Ground image downstream of building faces standing inside the reflection
/// volume. The reflector plane itself is not a blocker.
Region2D blockedArea(const CityModel& city, std::size_t buildingIndex, const ReflectionPlane& rp,
                     const std::vector<ConstrainedZonotope>& cells, double eps);

struct PlaneProduct {
  std::size_t planeIndex = 0;
  Region2D potential, invisible, blocked;
};

/// Union over planes of (potential - invisible - blocked), minus the shadow.
Region2D gnssReflection(const std::vector<PlaneProduct>& perPlane, const Region2D& shadowRegion);

struct ReflectionProduct {
  std::string satelliteId;
  int buildingId = 0;
  std::size_t buildingIndex = 0;
  ReflectionPlaneSet planes;
  std::vector<PlaneProduct> perPlane;
  Region2D reflectionRegion;
};

/// Reflection products of every building for one satellite. `shadow` must
/// come from computeShadows for the same satellite and AOI.
std::vector<ReflectionProduct> computeReflections(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                                                  const ShadowProduct& shadow, const PipelineOptions& opt = {});

/// Union of the per-building reflection regions.
Region2D satelliteReflectionRegion(const std::vector<ReflectionProduct>& products);

}  // namespace urbangnss
