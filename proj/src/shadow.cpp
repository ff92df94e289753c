#include "urbangnss/shadow.hpp"

#include <cmath>
#include <stdexcept>

namespace urbangnss {

SatelliteState satelliteFromAzEl(std::string id, double azimuth, double elevation, double range, const Vec3& origin) {
  SatelliteState s;
  s.id = std::move(id);
  s.azimuth = azimuth;
  s.elevation = elevation;
  const Vec3 u(std::sin(azimuth) * std::cos(elevation), std::cos(azimuth) * std::cos(elevation), std::sin(elevation));
  s.position = origin + range * u;
  return s;
}

Vec3 shadowDirection(const Building& b, const SatelliteState& s) {
  const Vec3 d = b.representativePoint - s.position;
  const double len = d.norm();
  if (!(len > tol::geom)) throw std::invalid_argument("shadowDirection: satellite coincides with building");
  return d / len;
}

CZCollection shadowVolume(const Building& b, const Vec3& dir, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("shadowVolume: eps must be positive");
  Eigen::MatrixXd g(3, 1);
  g.col(0) = eps * dir / 2.0;
  // Segment from 0 to eps*dir as a one-generator zonotope.
  const auto sweep = ConstrainedZonotope::zonotope(toVec(Vec3(eps * dir / 2.0)), g);
  CZCollection out;
  for (const auto& tri : b.triangles) out.push_back(minkowskiSum(tri, sweep));
  return out;
}

std::vector<ConstrainedZonotope> liftedCells(const AOI& aoi, double height) {
  std::vector<ConstrainedZonotope> out;
  out.reserve(aoi.cells.size());
  for (const auto& c : aoi.cells) out.push_back(c.lifted(height));
  return out;
}

std::vector<Region2D> sliceVolume(const ConstrainedZonotope& volume, const std::vector<ConstrainedZonotope>& cells) {
  std::vector<Region2D> out;
  for (const auto& cell : cells) {
    const auto piece = intersect(volume, cell);
    if (!piece || piece->affineDim() < 2) continue;
    std::vector<Vec2> pts;
    pts.reserve(piece->vertices().size());
    for (const auto& v : piece->vertices()) pts.emplace_back(v(0), v(1));
    const auto ring = poly::convexPolygon2D(pts, 1e-12);
    if (ring.size() < 3) continue;
    auto r = Region2D::fromRing(ring);
    if (!r.empty()) out.push_back(std::move(r));
  }
  return out;
}

Region2D gnssShadow(const CZCollection& volumes, const AOI& aoi, double receiverHeight) {
  if (aoi.cells.empty()) throw std::invalid_argument("gnssShadow: empty AOI");
  const auto cells = liftedCells(aoi, receiverHeight);
  std::vector<Region2D> pieces;
  for (const auto& v : volumes) {
    auto s = sliceVolume(v, cells);
    pieces.insert(pieces.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return uniteAll(pieces);
}

ShadowProduct computeShadows(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                             const PipelineOptions& opt) {
  if (s.position.z() < 10.0 * city.maxBuildingHeight()) {
    throw std::invalid_argument("computeShadows: satellite " + s.id + " below 10x the tallest building");
  }
  ShadowProduct out;
  out.satelliteId = s.id;
  const std::size_t nb = city.buildings.size();
  out.perBuildingVolumes.resize(nb);
  out.perBuildingRegions.resize(nb);
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (std::size_t i = 0; i < nb; ++i) {
    const Building& b = city.buildings[i];
    out.perBuildingVolumes[i] = shadowVolume(b, shadowDirection(b, s), opt.epsilon);
    out.perBuildingRegions[i] = gnssShadow(out.perBuildingVolumes[i], aoi, opt.receiverHeight);
  }
  out.shadowRegion = uniteAll(out.perBuildingRegions);
  return out;
}

}  // namespace urbangnss
