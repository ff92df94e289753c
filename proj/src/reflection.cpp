#include "urbangnss/reflection.hpp"

#include <cmath>
#include <stdexcept>

namespace urbangnss {

namespace {

ConstrainedZonotope sweepSegment(const Vec3& dir, double eps) {
  Eigen::MatrixXd g(3, 1);
  g.col(0) = eps * dir / 2.0;
  return ConstrainedZonotope::zonotope(toVec(Vec3(eps * dir / 2.0)), g);
}

void appendSlices(const ConstrainedZonotope& flatPiece, const ConstrainedZonotope& sweep,
                  const std::vector<ConstrainedZonotope>& cells, std::vector<Region2D>& out) {
  auto s = sliceVolume(minkowskiSum(flatPiece, sweep), cells);
  out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
}

bool onReflector(std::size_t buildingIndex, std::size_t k, const Building& owner, std::size_t tri,
                 const ReflectionPlane& rp) {
  return k == buildingIndex && owner.planeOfTriangle[tri] == static_cast<int>(rp.planeIndex);
}

}  // namespace

Vec3 mirrorPoint(const Vec3& s, const Vec3& normal, const Vec3& center) {
  return s - 2.0 * normal.dot(s - center) * normal;
}

Vec3 mirrorSatellite(const Vec3& s, const Plane& plane) { return mirrorPoint(s, plane.unitNormal, plane.center); }

ReflectionPlaneSet findReflectionPlanes(const Building& b, std::size_t buildingIndex, const SatelliteState& s) {
  ReflectionPlaneSet out;
  out.buildingIndex = buildingIndex;
  for (std::size_t m = 0; m < b.planes.size(); ++m) {
    const Plane& p = b.planes[m];
    const Vec3 toSat = s.position - p.center;
    if (!(p.unitNormal.dot(toSat) > 0)) continue;
    ReflectionPlane rp;
    rp.planeIndex = m;
    rp.mirroredSatellite = mirrorSatellite(s.position, p);
    rp.reflectionDir = (p.planeVertexMean - rp.mirroredSatellite).normalized();
    if (!(rp.reflectionDir.z() < 0)) continue;
    rp.losDir = -toSat.normalized();
    rp.incidenceAngle = std::acos(std::clamp(p.unitNormal.dot(toSat.normalized()), -1.0, 1.0));
    out.planes.push_back(rp);
  }
  return out;
}

Region2D potentialArea(const Building& b, const ReflectionPlane& rp, const std::vector<ConstrainedZonotope>& cells,
                       double eps) {
  const auto sweep = sweepSegment(rp.reflectionDir, eps);
  std::vector<Region2D> pieces;
  for (const auto& z : b.planes[rp.planeIndex].triangles) appendSlices(z, sweep, cells, pieces);
  return uniteAll(pieces);
}

Region2D invisibleArea(const CityModel& city, std::size_t buildingIndex, const ReflectionPlane& rp,
                       const std::vector<CZCollection>& shadowVolumes, const std::vector<ConstrainedZonotope>& cells,
                       double eps) {
  const auto sweep = sweepSegment(rp.reflectionDir, eps);
  const Plane& plane = city.buildings[buildingIndex].planes[rp.planeIndex];
  std::vector<Region2D> pieces;
  for (std::size_t k = 0; k < shadowVolumes.size(); ++k) {
    const Building& caster = city.buildings[k];
    for (std::size_t t = 0; t < shadowVolumes[k].size(); ++t) {
      // Floor volumes lie below the ground and never reach a plane.
      if (caster.planeOfTriangle[t] < 0) continue;
      if (onReflector(buildingIndex, k, caster, t, rp)) continue;
      for (const auto& zq : plane.triangles) {
        const auto hit = intersect(shadowVolumes[k][t], zq);
        if (!hit || hit->affineDim() < 2) continue;
        appendSlices(*hit, sweep, cells, pieces);
      }
    }
  }
  return uniteAll(pieces);
}

Region2D blockedArea(const CityModel& city, std::size_t buildingIndex, const ReflectionPlane& rp,
                     const std::vector<ConstrainedZonotope>& cells, double eps) {
  const auto sweep = sweepSegment(rp.reflectionDir, eps);
  const Building& owner = city.buildings[buildingIndex];
  std::vector<ConstrainedZonotope> beams;
  for (const auto& zq : owner.planes[rp.planeIndex].triangles) beams.push_back(minkowskiSum(zq, sweep));
  std::vector<Region2D> pieces;
  for (std::size_t k = 0; k < city.buildings.size(); ++k) {
    const Building& other = city.buildings[k];
    for (std::size_t t = 0; t < other.mesh.size(); ++t) {
      if (other.planeOfTriangle[t] < 0) continue;  // floor
      if (onReflector(buildingIndex, k, other, t, rp)) continue;
      for (const auto& beam : beams) {
        const auto hit = intersect(beam, other.triangles[t]);
        if (!hit || hit->affineDim() < 2) continue;
        appendSlices(*hit, sweep, cells, pieces);
      }
    }
  }
  return uniteAll(pieces);
}

Region2D gnssReflection(const std::vector<PlaneProduct>& perPlane, const Region2D& shadowRegion) {
  std::vector<Region2D> parts;
  parts.reserve(perPlane.size());
  for (const auto& p : perPlane) {
    const Region2D excluded[2] = {p.invisible, p.blocked};
    parts.push_back(difference(p.potential, uniteAll(excluded)));
  }
  return difference(uniteAll(parts), shadowRegion);
}

std::vector<ReflectionProduct> computeReflections(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                                                  const ShadowProduct& shadow, const PipelineOptions& opt) {
  if (shadow.perBuildingVolumes.size() != city.buildings.size()) {
    throw std::invalid_argument("computeReflections: shadow product does not match the city model");
  }
  const auto cells = liftedCells(aoi, opt.receiverHeight);
  std::vector<ReflectionProduct> out(city.buildings.size());
  struct Item {
    std::size_t building, slot;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < city.buildings.size(); ++i) {
    out[i].satelliteId = s.id;
    out[i].buildingId = city.buildings[i].id;
    out[i].buildingIndex = i;
    out[i].planes = findReflectionPlanes(city.buildings[i], i, s);
    out[i].perPlane.resize(out[i].planes.planes.size());
    for (std::size_t m = 0; m < out[i].planes.planes.size(); ++m) items.push_back({i, m});
  }
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (std::size_t w = 0; w < items.size(); ++w) {
    const auto [i, m] = items[w];
    const Building& b = city.buildings[i];
    const ReflectionPlane& rp = out[i].planes.planes[m];
    PlaneProduct& pp = out[i].perPlane[m];
    pp.planeIndex = rp.planeIndex;
    pp.potential = potentialArea(b, rp, cells, opt.epsilon);
    if (pp.potential.empty()) continue;
    pp.invisible = invisibleArea(city, i, rp, shadow.perBuildingVolumes, cells, opt.epsilon);
    pp.blocked = blockedArea(city, i, rp, cells, opt.epsilon);
  }
  for (auto& r : out) r.reflectionRegion = gnssReflection(r.perPlane, shadow.shadowRegion);
  return out;
}

Region2D satelliteReflectionRegion(const std::vector<ReflectionProduct>& products) {
  std::vector<Region2D> parts;
  parts.reserve(products.size());
  for (const auto& p : products) parts.push_back(p.reflectionRegion);
  return uniteAll(parts);
}

}  // namespace urbangnss
