#include "urbangnss/oracle.hpp"

#include "urbangnss/raytrace.hpp"
#include "urbangnss/reflection.hpp"

namespace urbangnss {

std::string_view toString(ReceptionCondition c) {
  switch (c) {
    case ReceptionCondition::NlosOnly: return "NLOS_ONLY";
    case ReceptionCondition::LosOnly: return "LOS_ONLY";
    case ReceptionCondition::LosNlos: return "LOS_NLOS";
  }
  return "?";
}

std::optional<ReceptionCondition> conditionFromString(std::string_view s) {
  if (s == "NLOS_ONLY") return ReceptionCondition::NlosOnly;
  if (s == "LOS_ONLY") return ReceptionCondition::LosOnly;
  if (s == "LOS_NLOS") return ReceptionCondition::LosNlos;
  return std::nullopt;
}

bool losClear(const CityModel& city, const Vec3& receiver, const SatelliteState& s) {
  return !segmentBlocked(city, receiver, s.position);
}

std::vector<BouncePath> bouncePaths(const CityModel& city, const Vec3& receiver, const SatelliteState& s) {
  std::vector<BouncePath> out;
  const double direct = (s.position - receiver).norm();
  for (std::size_t i = 0; i < city.buildings.size(); ++i) {
    const Building& b = city.buildings[i];
    for (std::size_t m = 0; m < b.planes.size(); ++m) {
      const Plane& p = b.planes[m];
      if (!(p.unitNormal.dot(s.position - p.center) > 0)) continue;
      // The receiver must be on the reflecting side.
      if (!(p.unitNormal.dot(receiver - p.center) > 0)) continue;
      const Vec3 mirrored = mirrorSatellite(s.position, p);
      const Vec3 d = mirrored - receiver;
      for (std::size_t ti : p.triangleIndices) {
        const auto t = rayTriangle(receiver, d, b.mesh[ti]);
        if (!t || *t <= 0.0 || *t >= 1.0) continue;
        const Vec3 r = receiver + *t * d;
        const int bi = static_cast<int>(i), pm = static_cast<int>(m);
        if (segmentBlocked(city, r, s.position, 1e-6, bi, pm)) continue;
        if (segmentBlocked(city, r, receiver, 1e-6, bi, pm)) continue;
        out.push_back({i, m, r, d.norm() - direct});
        break;
      }
    }
  }
  return out;
}

std::optional<ReceptionCondition> oracleClassify(const Vec2& receiver, const SatelliteState& s, const CityModel& city,
                                                 double receiverHeight) {
  const Vec3 x(receiver.x(), receiver.y(), receiverHeight);
  const bool los = losClear(city, x, s);
  const bool nlos = !bouncePaths(city, x, s).empty();
  if (los && nlos) return ReceptionCondition::LosNlos;
  if (los) return ReceptionCondition::LosOnly;
  if (nlos) return ReceptionCondition::NlosOnly;
  return std::nullopt;
}

}  // namespace urbangnss
