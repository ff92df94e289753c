#pragma once

#include <string>
#include <vector>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/czono.hpp"
#include "urbangnss/region2d.hpp"

namespace urbangnss {

struct SatelliteState {
  std::string id;
  Vec3 position = Vec3::Zero();
  double azimuth = 0.0;    // radians, clockwise from +y (north)
  double elevation = 0.0;  // radians
};

/// Satellite at the given azimuth/elevation and range from `origin`
/// (x east, y north, z up).
SatelliteState satelliteFromAzEl(std::string id, double azimuth, double elevation, double range,
                                 const Vec3& origin = Vec3::Zero());

struct PipelineOptions {
  double epsilon = 1e5;         // sweep length of shadow and reflection volumes, m
  double receiverHeight = 0.0;  // height of the slicing plane, m
  bool parallel = false;        // OpenMP over buildings / planes
};

/// Unit vector from the satellite to the building's representative point.
Vec3 shadowDirection(const Building& b, const SatelliteState& s);

/// One CZ per building triangle: triangle swept by eps * dir.
CZCollection shadowVolume(const Building& b, const Vec3& dir, double eps = 1e5);

/// Lifted AOI cells (z = height), reused across slicing calls.
std::vector<ConstrainedZonotope> liftedCells(const AOI& aoi, double height);

/// Ground polygon of (volume ∩ cell) for each lifted cell, dropping z.
std::vector<Region2D> sliceVolume(const ConstrainedZonotope& volume, const std::vector<ConstrainedZonotope>& cells);

/// Union over volume members of their slices with the AOI.
Region2D gnssShadow(const CZCollection& volumes, const AOI& aoi, double receiverHeight = 0.0);

struct ShadowProduct {
  std::string satelliteId;
  std::vector<CZCollection> perBuildingVolumes;  // cached for the reflection step
  std::vector<Region2D> perBuildingRegions;
  Region2D shadowRegion;
};

/// Shadows of every building for one satellite, unioned in building order.
ShadowProduct computeShadows(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                             const PipelineOptions& opt = {});

}  // namespace urbangnss
