#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/region2d.hpp"
#include "urbangnss/shadow.hpp"

// Grid evaluation kernels. Each parallel kernel has a serial twin with the
// same output; tests compare them element by element.
namespace urbangnss::kernels {

inline constexpr std::uint8_t kLosBit = 1;
inline constexpr std::uint8_t kBounceBit = 2;

/// Points of a square AOI lattice with the given spacing, edges included,
/// laid out row-major in the AOI's street frame.
std::vector<Vec2> aoiGridPoints(const AOI& aoi, double spacing);

/// Oracle code per point: kLosBit if the direct path is clear, kBounceBit if
/// a single-bounce path exists.
std::vector<std::uint8_t> oracleGridSerial(const CityModel& city, std::span<const Vec2> pts, const SatelliteState& s,
                                           double receiverHeight = 0.0);
std::vector<std::uint8_t> oracleGridParallel(const CityModel& city, std::span<const Vec2> pts,
                                             const SatelliteState& s, double receiverHeight = 0.0);

struct Equivalence {
  std::size_t compared = 0;    // points outside the boundary band
  std::size_t banded = 0;      // points skipped for being near the boundary
  std::size_t mismatches = 0;  // outside the band and disagreeing
  std::vector<Vec2> mismatchPoints;
};

/// Compares region membership against expected(code) at every point farther
/// than `band` from the region boundary.
Equivalence compareWithOracle(const Region2D& region, std::span<const Vec2> pts, std::span<const std::uint8_t> codes,
                              const std::function<bool(std::uint8_t)>& expected, double band);

/// Membership of each point in the region (serial and OpenMP).
std::vector<std::uint8_t> membershipSerial(const Region2D& region, std::span<const Vec2> pts);
std::vector<std::uint8_t> membershipParallel(const Region2D& region, std::span<const Vec2> pts);

}  // namespace urbangnss::kernels
