#include <doctest.h>

#include "urbangnss/kernels.hpp"
#include "urbangnss/oracle.hpp"
#include "urbangnss/simeval.hpp"

using namespace urbangnss;

TEST_CASE("aoi grid layout") {
  const auto aoi = makeAOI(Vec2(5, -3), 2.0, StreetFrame());
  const auto pts = kernels::aoiGridPoints(aoi, 1.0);
  REQUIRE(pts.size() == 25);
  CHECK((pts.front() - Vec2(3, -5)).norm() < 1e-12);
  CHECK((pts.back() - Vec2(7, -1)).norm() < 1e-12);
}

TEST_CASE("serial and parallel kernels agree") {
  for (std::uint64_t seed : {3u, 8u, 21u}) {
    const auto sc = randomBoxScene(seed);
    const auto pts = kernels::aoiGridPoints(sc.city.aoi, 2.0);
    for (const auto& s : sc.satellites) {
      const auto a = kernels::oracleGridSerial(sc.city, pts, s);
      const auto b = kernels::oracleGridParallel(sc.city, pts, s);
      CHECK(a == b);
      // Spot check against the per-point oracle.
      for (std::size_t i = 0; i < pts.size(); i += 97) {
        const Vec3 x(pts[i].x(), pts[i].y(), 0);
        CHECK(((a[i] & kernels::kLosBit) != 0) == losClear(sc.city, x, s));
        CHECK(((a[i] & kernels::kBounceBit) != 0) == !bouncePaths(sc.city, x, s).empty());
      }
    }
    const auto region = computeShadows(sc.city, sc.city.aoi, sc.satellites[0]).shadowRegion;
    const auto ms = kernels::membershipSerial(region, pts);
    CHECK(ms == kernels::membershipParallel(region, pts));
    for (std::size_t i = 0; i < pts.size(); i += 13) CHECK((ms[i] != 0) == contains(region, pts[i]));
  }
}

TEST_CASE("oracle comparison counts") {
  const auto r = Region2D::box(0, 0, 10, 10);
  const std::vector<Vec2> pts{{5, 5}, {20, 20}, {10.01, 5}, {2, 2}};
  const std::vector<std::uint8_t> codes{1, 0, 0, 0};
  const auto eq = kernels::compareWithOracle(r, pts, codes, [](std::uint8_t c) { return c != 0; }, 0.05);
  CHECK(eq.banded == 1);
  CHECK(eq.compared == 3);
  CHECK(eq.mismatches == 1);
  REQUIRE(eq.mismatchPoints.size() == 1);
  CHECK((eq.mismatchPoints[0] - Vec2(2, 2)).norm() < 1e-12);
}
