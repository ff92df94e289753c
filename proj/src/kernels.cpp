#include "urbangnss/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "urbangnss/oracle.hpp"

namespace urbangnss::kernels {

namespace {

std::uint8_t oracleCode(const CityModel& city, const Vec2& p, const SatelliteState& s, double h) {
  const Vec3 x(p.x(), p.y(), h);
  std::uint8_t code = 0;
  if (losClear(city, x, s)) code |= kLosBit;
  if (!bouncePaths(city, x, s).empty()) code |= kBounceBit;
  return code;
}

}  // namespace

std::vector<Vec2> aoiGridPoints(const AOI& aoi, double spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("aoiGridPoints: spacing must be positive");
  const int n = static_cast<int>(std::floor(2.0 * aoi.halfWidth / spacing + 1e-9));
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const Vec2 local(-aoi.halfWidth + i * spacing, -aoi.halfWidth + j * spacing);
      pts.push_back(aoi.center + local.x() * aoi.frame.crossAxis + local.y() * aoi.frame.alongAxis);
    }
  }
  return pts;
}

std::vector<std::uint8_t> oracleGridSerial(const CityModel& city, std::span<const Vec2> pts, const SatelliteState& s,
                                           double receiverHeight) {
  std::vector<std::uint8_t> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = oracleCode(city, pts[i], s, receiverHeight);
  return out;
}

std::vector<std::uint8_t> oracleGridParallel(const CityModel& city, std::span<const Vec2> pts,
                                             const SatelliteState& s, double receiverHeight) {
  std::vector<std::uint8_t> out(pts.size());
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = oracleCode(city, pts[static_cast<std::size_t>(i)], s, receiverHeight);
  }
  return out;
}

Equivalence compareWithOracle(const Region2D& region, std::span<const Vec2> pts, std::span<const std::uint8_t> codes,
                              const std::function<bool(std::uint8_t)>& expected, double band) {
  if (pts.size() != codes.size()) throw std::invalid_argument("compareWithOracle: size mismatch");
  Equivalence e;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (boundaryDistance(region, pts[i]) <= band) {
      ++e.banded;
      continue;
    }
    ++e.compared;
    if (contains(region, pts[i]) != expected(codes[i])) {
      ++e.mismatches;
      e.mismatchPoints.push_back(pts[i]);
    }
  }
  return e;
}

std::vector<std::uint8_t> membershipSerial(const Region2D& region, std::span<const Vec2> pts) {
  std::vector<std::uint8_t> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = contains(region, pts[i]);
  return out;
}

std::vector<std::uint8_t> membershipParallel(const Region2D& region, std::span<const Vec2> pts) {
  std::vector<std::uint8_t> out(pts.size());
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = contains(region, pts[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace urbangnss::kernels
