#include "urbangnss/raytrace.hpp"

#include <algorithm>
#include <cmath>

namespace urbangnss {

std::optional<double> rayTriangle(const Vec3& o, const Vec3& d, const Triangle& t) {
  const Vec3 e1 = t.b - t.a;
  const Vec3 e2 = t.c - t.a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  const double scale = e1.norm() * e2.norm() * d.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = o - t.a;
  const double u = s.dot(p) * inv;
  constexpr double kEdge = 1e-12;
  if (u < -kEdge || u > 1.0 + kEdge) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < -kEdge || u + v > 1.0 + kEdge) return std::nullopt;
  return e2.dot(q) * inv;
}

bool segmentHitsBox(const Vec3& from, const Vec3& to, const Vec3& lo, const Vec3& hi) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = to - from;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d(i)) < 1e-300) {
      if (from(i) < lo(i) || from(i) > hi(i)) return false;
      continue;
    }
    double a = (lo(i) - from(i)) / d(i);
    double b = (hi(i) - from(i)) / d(i);
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

bool segmentBlocked(const CityModel& city, const Vec3& from, const Vec3& to, double clearance, int skipBuilding,
                    int skipPlane) {
  const Vec3 d = to - from;
  const double len = d.norm();
  if (!(len > 2 * clearance)) return false;
  const double tLo = clearance / len, tHi = 1.0 - clearance / len;
  const Vec3 pad = Vec3::Constant(1e-9);
  for (std::size_t bi = 0; bi < city.buildings.size(); ++bi) {
    const Building& b = city.buildings[bi];
    if (!segmentHitsBox(from, to, b.bboxMin - pad, b.bboxMax + pad)) continue;
    const bool skipping = static_cast<int>(bi) == skipBuilding;
    for (std::size_t ti = 0; ti < b.mesh.size(); ++ti) {
      if (skipping && b.planeOfTriangle[ti] == skipPlane) continue;
      const auto t = rayTriangle(from, d, b.mesh[ti]);
      if (t && *t > tLo && *t < tHi) return true;
    }
  }
  return false;
}

}  // namespace urbangnss
