#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/raytrace.hpp"

using namespace urbangnss;

namespace {

Building unitBox() { return makeBuilding(1, boxMesh(Vec2(0.5, 0.5), Vec2(1, 0), 0.5, 0.5, 1.0)); }

std::filesystem::path writeTemp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("triangle to constrained zonotope") {
  auto z = triangleToCZ(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK(z.contains(toVec(Vec3(0.25, 0.25, 0))));
  CHECK_FALSE(z.contains(toVec(Vec3(1, 1, 0))));
  CHECK(z.vertices().size() == 3);
  CHECK_THROWS_AS(triangleToCZ(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)), std::invalid_argument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10), w(0, 1);
  const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
  auto t = triangleToCZ(a, b, c);
  for (const auto& v : t.vertices()) {
    const Vec3 p = toVec3(v);
    CHECK(((p - a).norm() < 1e-12 || (p - b).norm() < 1e-12 || (p - c).norm() < 1e-12));
  }
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    double l1 = w(rng), l2 = w(rng);
    if (l1 + l2 > 1) {
      l1 = 1 - l1;
      l2 = 1 - l2;
    }
    inside += t.contains(toVec(Vec3(a + l1 * (b - a) + l2 * (c - a))));
  }
  CHECK(inside == 1000);
}

TEST_CASE("unit box planes") {
  const Building b = unitBox();
  CHECK(b.closed);
  CHECK(b.mesh.size() == 12);
  CHECK(b.planes.size() == 5);
  CHECK(b.floorTriangles.size() == 2);
  std::size_t grouped = 0;
  int walls = 0;
  for (const auto& p : b.planes) {
    grouped += p.triangleIndices.size();
    CHECK(p.unitNormal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Outward: normal points away from the box center.
    CHECK(p.unitNormal.dot(p.center - Vec3(0.5, 0.5, 0.5)) > 0);
    if (std::abs(p.unitNormal.z()) < 1e-9) ++walls;
    CHECK((p.center - p.planeVertexMean).norm() < tol::geom);
  }
  CHECK(walls == 4);
  CHECK(grouped + b.floorTriangles.size() == b.mesh.size());
  CHECK((b.representativePoint - Vec3(0.5, 0.5, 0.5)).norm() < tol::geom);
}

TEST_CASE("inward winding is corrected") {
  auto mesh = boxMesh(Vec2(0, 0), Vec2(1, 1), 3, 2, 7);
  for (auto& t : mesh) std::swap(t.b, t.c);
  const Building b = makeBuilding(2, mesh);
  for (const auto& p : b.planes) CHECK(p.unitNormal.dot(p.center - Vec3(0, 0, 3.5)) > 0);
}

TEST_CASE("coplanar disconnected facades stay separate") {
  // Two free-standing quads in the plane x = 0 with a gap between them.
  std::vector<Triangle> mesh = {
      {Vec3(0, 0, 0), Vec3(0, 5, 0), Vec3(0, 5, 10)}, {Vec3(0, 0, 0), Vec3(0, 5, 10), Vec3(0, 0, 10)},
      {Vec3(0, 8, 0), Vec3(0, 13, 0), Vec3(0, 13, 10)}, {Vec3(0, 8, 0), Vec3(0, 13, 10), Vec3(0, 8, 10)}};
  const Building b = makeBuilding(3, mesh);
  CHECK_FALSE(b.closed);
  CHECK(b.planes.size() == 2);
}

TEST_CASE("slightly tilted roof") {
  const double tilt = 1e-4;
  std::vector<Triangle> mesh = {{Vec3(0, 0, 10), Vec3(10, 0, 10), Vec3(10, 10, 10)},
                                {Vec3(0, 0, 10), Vec3(10, 10, 10), Vec3(0, 10, 10 + 10 * std::tan(tilt))}};
  CHECK(makeBuilding(4, mesh, 1e-3).planes.size() == 1);
  CHECK(makeBuilding(4, mesh, 1e-6).planes.size() == 2);
}

TEST_CASE("degenerate triangle is rejected with its index") {
  auto mesh = boxMesh(Vec2(0, 0), Vec2(1, 0), 1, 1, 1);
  mesh.push_back({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)});
  try {
    makeBuilding(9, mesh);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("triangle 12") != std::string::npos);
  }
}

TEST_CASE("area of interest") {
  const auto a = makeAOI(Vec2(0, 0), 60, StreetFrame());
  CHECK(a.cells.size() == 1);
  CHECK(a.region().area() == doctest::Approx(120.0 * 120.0));
  const double th = M_PI / 6;
  const auto r = makeAOI(Vec2(0, 0), 60, StreetFrame(Vec2(0, 0), Vec2(std::cos(th), std::sin(th))));
  const auto verts = r.cells[0].vertices();
  REQUIRE(verts.size() == 4);
  for (const auto& v : verts) {
    // Rotating back by -30 degrees yields (+-60, +-60).
    const double x = std::cos(-th) * v(0) - std::sin(-th) * v(1);
    const double y = std::sin(-th) * v(0) + std::cos(-th) * v(1);
    CHECK(std::abs(std::abs(x) - 60) < 1e-9);
    CHECK(std::abs(std::abs(y) - 60) < 1e-9);
  }
  CHECK_THROWS_AS(makeAOI(Vec2(0, 0), 0, StreetFrame()), std::invalid_argument);

  const auto city = makeCityModel(groundMesh(-100, -50, 100, 50), {});
  const auto g = aoiFromGround(city);
  CHECK(g.region().area() == doctest::Approx(200.0 * 100.0));
}

TEST_CASE("json round trip and loader errors") {
  auto city = makeCityModel(groundMesh(-50, -50, 50, 50), {{7, boxMesh(Vec2(0, 0), Vec2(1, 0), 5, 5, 20)}});
  const auto path = writeTemp("ug_city.json", cityModelToJson(city).dump());
  const auto back = loadCityModel(path);
  CHECK(back.buildings.size() == 1);
  CHECK(back.buildings[0].id == 7);
  CHECK(back.buildings[0].planes.size() == 5);
  CHECK(back.maxBuildingHeight() == doctest::Approx(20));

  const auto empty = loadCityModel(writeTemp("ug_empty.json", R"({"ground": [], "buildings": []})"));
  CHECK(empty.buildings.empty());

  const auto bad = writeTemp("ug_bad.json",
                             R"({"buildings": [{"id": 1, "triangles": [[[0,0,0],[1,0,0],[2,0,0]]]}]})");
  try {
    loadCityModel(bad);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("triangle 0") != std::string::npos);
  }
  const auto malformed = writeTemp("ug_malformed.json", R"({"ground": [[[0,0,0],[1,0],[0,1,0]]]})");
  try {
    loadCityModel(malformed);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("ground[0][1]") != std::string::npos);
  }
  CHECK_THROWS_AS(loadCityModel("/nonexistent/city.json"), std::runtime_error);
}

TEST_CASE("ray primitives") {
  const Triangle t{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  auto h = rayTriangle(Vec3(0.2, 0.2, 1), Vec3(0, 0, -1), t);
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(1.0));
  CHECK_FALSE(rayTriangle(Vec3(0.8, 0.8, 1), Vec3(0, 0, -1), t).has_value());

  auto city = makeCityModel(groundMesh(-50, -50, 50, 50), {{1, boxMesh(Vec2(0, 0), Vec2(1, 0), 5, 5, 20)}});
  CHECK(segmentBlocked(city, Vec3(-20, 0, 0), Vec3(20, 0, 1)));
  CHECK_FALSE(segmentBlocked(city, Vec3(-20, 0, 0), Vec3(-20, 0, 100)));
  CHECK_FALSE(segmentBlocked(city, Vec3(-20, 0, 30), Vec3(20, 0, 30)));
}
