#include <doctest.h>

#include <cmath>
#include <random>

#include "urbangnss/geojson.hpp"
#include "urbangnss/region2d.hpp"

using namespace urbangnss;

namespace {

Region2D sq(double x0, double y0, double x1, double y1) { return Region2D::box(x0, y0, x1, y1); }

struct Rect {
  double x0, y0, x1, y1;
  bool has(double x, double y) const { return x > x0 && x < x1 && y > y0 && y < y1; }
};

std::vector<Rect> randomRects(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> pos(0, 20), size(1, 8);
  std::vector<Rect> out(static_cast<std::size_t>(count(rng)));
  for (auto& r : out) {
    r.x0 = pos(rng);
    r.y0 = pos(rng);
    r.x1 = r.x0 + size(rng);
    r.y1 = r.y0 + size(rng);
  }
  return out;
}

Region2D soup(const std::vector<Rect>& rects) {
  Region2D out;
  for (const auto& r : rects) out = unite(out, sq(r.x0, r.y0, r.x1, r.y1));
  return out;
}

bool soupHas(const std::vector<Rect>& rects, double x, double y) {
  for (const auto& r : rects) {
    if (r.has(x, y)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("union") {
  auto a = sq(0, 0, 1, 1);
  CHECK(canonicalEqual(unite(a, Region2D{}), a));
  auto two = unite(sq(0, 0, 1, 1), sq(2, 2, 3, 3));
  CHECK(two.polygons().size() == 2);
  CHECK(two.area() == doctest::Approx(2.0));
  auto one = unite(sq(0, 0, 2, 2), sq(1, 1, 3, 3));
  CHECK(one.polygons().size() == 1);
  CHECK(one.area() == doctest::Approx(4 + 4 - 1));
}

TEST_CASE("difference") {
  auto a = sq(0, 0, 3, 3);
  CHECK(canonicalEqual(difference(a, Region2D{}), a));
  auto holed = difference(a, sq(1, 1, 2, 2));
  REQUIRE(holed.polygons().size() == 1);
  CHECK(holed.polygons()[0].holes.size() == 1);
  CHECK(holed.area() == doctest::Approx(8.0));
  CHECK(difference(a, a).empty());
  CHECK_FALSE(contains(holed, Vec2(1.5, 1.5)));
  CHECK(contains(holed, Vec2(0.5, 1.5)));
}

TEST_CASE("intersection") {
  CHECK(intersection(sq(0, 0, 1, 1), Region2D{}).empty());
  auto r = intersection(sq(0, 0, 2, 2), sq(1, 1, 3, 3));
  CHECK(r.area() == doctest::Approx(1.0));
  CHECK(canonicalEqual(r, sq(1, 1, 2, 2)));
  auto a = sq(0, 0, 2, 1);
  CHECK(canonicalEqual(intersection(a, a), a));
}

TEST_CASE("canonical ring form") {
  const Ring cw = {{0, 1}, {1, 1}, {1, 0}, {0, 0}};
  auto r = Region2D::fromRing(cw);
  REQUIRE(r.polygons().size() == 1);
  const auto& outer = r.polygons()[0].outer;
  CHECK(outer.size() == 4);
  CHECK(outer[0] == Vec2(0, 0));
  CHECK(ringArea(outer) > 0);
  // Collinear vertex is removed.
  const Ring extra = {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(Region2D::fromRing(extra).polygons()[0].outer.size() == 4);
}

TEST_CASE("slivers are dropped") {
  CHECK(sq(0, 0, 1e-4, 1e-4).empty());
  CHECK(sq(0, 0, 10, 1e-6).empty());
  CHECK_FALSE(sq(0, 0, 0.01, 0.01).empty());
}

TEST_CASE("boolean laws on rectangle soups") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ra = randomRects(rng), rb = randomRects(rng), rc = randomRects(rng);
    const auto a = soup(ra), b = soup(rb), c = soup(rc);
    const auto box = sq(-1, -1, 30, 30);
    CHECK(difference(a, b).area() == doctest::Approx(intersection(a, difference(box, b)).area()).epsilon(1e-9));
    const auto lhs = intersection(unite(a, b), c);
    const auto rhs = unite(intersection(a, c), intersection(b, c));
    CHECK(std::abs(lhs.area() - rhs.area()) < 1e-6);
    CHECK(canonicalEqual(unite(a, b), unite(b, a)));
    const Region2D parts[3] = {a, b, c};
    const Region2D rev[3] = {c, a, b};
    CHECK(canonicalEqual(uniteAll(parts), uniteAll(rev)));
    double modeArea = 0;
    for (const auto& m : modes(a)) modeArea += m.area();
    CHECK(modeArea == doctest::Approx(a.area()));

    // Grid oracle on the union membership.
    const auto u = unite(a, b);
    int mismatches = 0;
    for (double x = 0.05; x < 29; x += 0.37) {
      for (double y = 0.05; y < 29; y += 0.41) {
        if (boundaryDistance(u, Vec2(x, y)) < 1e-3) continue;
        const bool truth = soupHas(ra, x, y) || soupHas(rb, x, y);
        mismatches += (contains(u, Vec2(x, y)) != truth);
      }
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("modes") {
  CHECK(modes(sq(0, 0, 1, 1)).size() == 1);
  auto far = unite(sq(0, 0, 1, 1), sq(51, 0, 52, 1));
  CHECK(modes(far, 1.0).size() == 2);
  auto near = unite(sq(0, 0, 1, 1), sq(1.5, 0, 2.5, 1));
  CHECK(modes(near, 1.0).size() == 1);
  auto sized = unite(sq(0, 0, 1, 1), sq(10, 0, 13, 3));
  const auto ms = modes(sized, 0.5);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].area() == doctest::Approx(9.0));
  CHECK_THROWS_AS(modes(sized, 0.0), std::invalid_argument);
}

TEST_CASE("centroid and bounds") {
  auto a = sq(0, 0, 10, 10);
  CHECK(centroid(a).isApprox(Vec2(5, 5)));
  const StreetFrame axis(Vec2(0, 0), Vec2(0, 1));
  auto [cw, aw] = bounds(a, axis);
  CHECK(cw == doctest::Approx(10));
  CHECK(aw == doctest::Approx(10));

  auto pair = unite(sq(-1, -1, 1, 1), sq(9, -1, 11, 1));
  const Vec2 c = centroid(pair);
  CHECK(c.x() == doctest::Approx(5.0));
  CHECK(c.y() == doctest::Approx(0.0).epsilon(1e-9));

  const double s = 4.0, h = s / std::sqrt(2.0);
  const Ring diamond = {{h, 0}, {0, h}, {-h, 0}, {0, -h}};
  auto rot = Region2D::fromRing(diamond);
  auto [dx, dy] = bounds(rot, axis);
  CHECK(dx == doctest::Approx(s * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(dy == doctest::Approx(s * std::sqrt(2.0)).epsilon(1e-6));

  CHECK_THROWS_AS(centroid(Region2D{}), std::invalid_argument);
}

TEST_CASE("street frame") {
  const StreetFrame f(Vec2(1, 2), Vec2(std::cos(0.5), std::sin(0.5)));
  CHECK(f.alongAxis.dot(f.crossAxis) == doctest::Approx(0.0));
  const Vec2 p(3.5, -2.0);
  CHECK(f.toWorld(f.toLocal(p)).isApprox(p));
}

TEST_CASE("geojson round trip") {
  auto r = unite(difference(sq(0, 0, 3, 3), sq(1, 1, 2, 2)), sq(5, 5, 6, 6));
  const auto g = toGeoJSONGeometry(r);
  CHECK(g["type"] == "MultiPolygon");
  CHECK(g["coordinates"].size() == 2);
  CHECK(canonicalEqual(fromGeoJSONGeometry(g), r));
}

TEST_CASE("working range guard") {
  CHECK_THROWS_AS(sq(0, 0, 5000, 1), std::out_of_range);
}
