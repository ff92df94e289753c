#include <doctest.h>

#include <cmath>

#include "urbangnss/kernels.hpp"
#include "urbangnss/shadow.hpp"

using namespace urbangnss;

namespace {

CityModel boxCity(std::vector<std::pair<int, std::vector<Triangle>>> bs) {
  auto city = makeCityModel(groundMesh(-300, -300, 300, 300), std::move(bs));
  city.aoi = makeAOI(Vec2(0, 0), 60, StreetFrame());
  return city;
}

SatelliteState satToward(const Vec3& target, const Vec3& unitFromTarget, double range = 2e7) {
  SatelliteState s;
  s.id = "S";
  s.position = target + range * unitFromTarget.normalized();
  return s;
}

bool shadowExpected(std::uint8_t code) { return !(code & kernels::kLosBit); }

}  // namespace

TEST_CASE("shadow direction") {
  const auto city = boxCity({{1, boxMesh(Vec2(0, 0), Vec2(1, 0), 5, 5, 20)}});
  const Building& b = city.buildings[0];
  SatelliteState s;
  s.position = b.representativePoint + Vec3(0, 0, 990);
  CHECK((shadowDirection(b, s) - Vec3(0, 0, -1)).norm() < 1e-12);
  s.position = b.representativePoint + Vec3(1000, 0, 1000);
  CHECK((shadowDirection(b, s) - Vec3(-1, 0, -1) / std::sqrt(2.0)).norm() < 1e-12);
  s.position = b.representativePoint + Vec3(123, -4567, 8910);
  CHECK(shadowDirection(b, s).norm() == doctest::Approx(1.0).epsilon(1e-12));
  s.position = b.representativePoint;
  CHECK_THROWS_AS(shadowDirection(b, s), std::invalid_argument);
}

TEST_CASE("shadow volume of a box") {
  const auto city = boxCity({{1, boxMesh(Vec2(5, 5), Vec2(1, 0), 5, 5, 20)}});
  const Building& b = city.buildings[0];
  const Vec3 dir = Vec3(-1, 0, -1).normalized();
  const auto vol = shadowVolume(b, dir, 1e5);
  CHECK(vol.size() == b.mesh.size());
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const auto n = vol[i].vertices().size();
    CHECK((n == 6 || n == 4 || n == 5));
    // Brute-force pairwise sums of triangle corners and sweep ends.
    for (const Vec3* c : {&b.mesh[i].a, &b.mesh[i].b, &b.mesh[i].c}) {
      CHECK(vol[i].contains(toVec(*c), 1e-6));
      CHECK(vol[i].contains(toVec(Vec3(*c + 1e5 * dir)), 1e-3));
    }
  }
  CHECK_THROWS_AS(shadowVolume(b, dir, 0.0), std::invalid_argument);

  // Vertical sweep meets the ground exactly in the footprint.
  const auto down = shadowVolume(b, Vec3(0, 0, -1), 1e5);
  CHECK(canonicalEqual(gnssShadow(down, city.aoi), Region2D::box(0, 0, 10, 10), 1e-6));
}

TEST_CASE("shadow of a box at 45 degrees") {
  const auto city = boxCity({{1, boxMesh(Vec2(5, 5), Vec2(1, 0), 5, 5, 20)}});
  const auto s = satToward(city.buildings[0].representativePoint, Vec3(1, 0, 1));
  const auto prod = computeShadows(city, city.aoi, s);
  CHECK(canonicalEqual(prod.shadowRegion, Region2D::box(-20, 0, 10, 10), 1e-6));
  CHECK(prod.perBuildingVolumes.size() == 1);

  const auto zenith = satToward(city.buildings[0].representativePoint, Vec3(0, 0, 1));
  CHECK(canonicalEqual(computeShadows(city, city.aoi, zenith).shadowRegion, Region2D::box(0, 0, 10, 10), 1e-6));

  // Low satellite: the shadow runs out of the AOI.
  const auto low = satToward(city.buildings[0].representativePoint, Vec3(std::cos(0.05), 0, std::sin(0.05)));
  const auto lowShadow = computeShadows(city, city.aoi, low).shadowRegion;
  CHECK(lowShadow.area() == doctest::Approx(70.0 * 10.0).epsilon(1e-6));
  CHECK(contains(lowShadow, Vec2(-59.9, 5)));
}

TEST_CASE("satellite height guard") {
  const auto city = boxCity({{1, boxMesh(Vec2(5, 5), Vec2(1, 0), 5, 5, 20)}});
  SatelliteState s;
  s.position = Vec3(1000, 0, 150);
  CHECK_THROWS_AS(computeShadows(city, city.aoi, s), std::invalid_argument);
}

TEST_CASE("shadow matches the ray-cast oracle") {
  const auto city = boxCity({{1, boxMesh(Vec2(-20, 10), Vec2(1, 0.3), 8, 5, 35)},
                             {2, boxMesh(Vec2(25, -15), Vec2(0.2, 1), 10, 6, 18)},
                             {3, boxMesh(Vec2(5, 30), Vec2(1, 0), 4, 4, 50)}});
  const auto pts = kernels::aoiGridPoints(city.aoi, 1.0);
  for (double az : {0.3, 2.0, 4.1}) {
    for (double el : {0.25, 0.7, 1.2}) {
      const auto s = satelliteFromAzEl("G", az, el, 2e7);
      const auto region = computeShadows(city, city.aoi, s).shadowRegion;
      const auto codes = kernels::oracleGridParallel(city, pts, s);
      const auto eq = kernels::compareWithOracle(region, pts, codes, shadowExpected, 0.05);
      CHECK(eq.mismatches == 0);
      CHECK(eq.compared > pts.size() * 9 / 10);
    }
  }
}

TEST_CASE("shadow properties") {
  auto one = boxCity({{1, boxMesh(Vec2(-20, 10), Vec2(1, 0.3), 8, 5, 35)}});
  auto two = boxCity({{1, boxMesh(Vec2(-20, 10), Vec2(1, 0.3), 8, 5, 35)},
                      {2, boxMesh(Vec2(25, -15), Vec2(0.2, 1), 10, 6, 18)}});
  const auto s = satelliteFromAzEl("G", 1.1, 0.5, 2e7);
  const auto a1 = computeShadows(one, one.aoi, s).shadowRegion;
  const auto a2 = computeShadows(two, two.aoi, s).shadowRegion;
  CHECK(a2.area() >= a1.area() - 1e-9);

  PipelineOptions doubled;
  doubled.epsilon = 2e5;
  CHECK(canonicalEqual(computeShadows(two, two.aoi, s, doubled).shadowRegion, a2, 1e-5));

  PipelineOptions par;
  par.parallel = true;
  const auto p = computeShadows(two, two.aoi, s, par).shadowRegion;
  CHECK(canonicalEqual(p, a2, 0.0));
}
