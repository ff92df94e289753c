#pragma once

#include <optional>
#include <vector>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/reception.hpp"
#include "urbangnss/shadow.hpp"

namespace urbangnss {

/// One valid single-bounce path from a satellite to a receiver.
struct BouncePath {
  std::size_t buildingIndex = 0;
  std::size_t planeIndex = 0;
  Vec3 reflectionPoint = Vec3::Zero();
  double extraPath = 0.0;  // |s' - x| - |s - x|, m
};

/// Direct segment from the receiver to the satellite crosses no building triangle.
bool losClear(const CityModel& city, const Vec3& receiver, const SatelliteState& s);

/// All single-bounce paths via illuminated building planes: the line from the
/// receiver to the mirrored satellite meets a plane triangle, and both legs
/// (reflection point to satellite, reflection point to receiver) are clear.
std::vector<BouncePath> bouncePaths(const CityModel& city, const Vec3& receiver, const SatelliteState& s);

/// Brute-force reception condition at a ground point. nullopt when the
/// satellite is unobservable (no direct and no reflected path).
std::optional<ReceptionCondition> oracleClassify(const Vec2& receiver, const SatelliteState& s, const CityModel& city,
                                                 double receiverHeight = 0.0);

}  // namespace urbangnss
