#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "urbangnss/modeselect.hpp"

using namespace urbangnss;

namespace {

std::vector<RangeObservation> observe(const Vec2& truth, int n, RandomStream& rng, double pLos = 1.0,
                                      double noise = 0.0) {
  std::vector<RangeObservation> out;
  for (int j = 0; j < n; ++j) {
    const double az = 2 * M_PI * uniform01(rng), el = 0.2 + 1.1 * uniform01(rng);
    RangeObservation o;
    o.state = satelliteFromAzEl("G" + std::to_string(j), az, el, 2e7);
    o.pseudorange = (o.state.position - Vec3(truth.x(), truth.y(), 0)).norm() + noise * normal01(rng);
    o.pLos = pLos;
    out.push_back(o);
  }
  return out;
}

}  // namespace

TEST_CASE("ideal selection") {
  const std::vector<Region2D> modes{Region2D::box(0, 0, 5, 5), Region2D::box(5, 0, 10, 5), Region2D::box(20, 0, 25, 5)};
  CHECK(idealSelect(modes, Vec2(22, 2)) == 2u);
  CHECK_FALSE(idealSelect(modes, Vec2(50, 2)));
  // Shared edge: both contain it, the lower index wins.
  CHECK(idealSelect(modes, Vec2(5, 2)) == 0u);
  CHECK(idealSelect(modes, Vec2(5 + 5e-7, 2)) == 0u);
}

TEST_CASE("uniform samples stay inside") {
  const auto r = difference(Region2D::box(0, 0, 10, 10), Region2D::box(2, 2, 8, 8));
  auto rng = makeStream(3, {});
  const auto pts = samplePoints(r, 500, rng);
  CHECK(pts.size() == 500);
  int inHoleHalf = 0;
  for (const auto& p : pts) {
    CHECK(contains(r, p));
    inHoleHalf += p.x() < 5;
  }
  // Ring is symmetric: about half the samples on each side.
  CHECK(std::abs(inHoleHalf - 250) < 50);
}

TEST_CASE("spc trivial cases") {
  const std::vector<Region2D> one{Region2D::box(0, 0, 5, 5)};
  auto rng = makeStream(1, {});
  const auto obs = observe(Vec2(2, 2), 6, rng);
  CHECK(spcSelect(one, obs, {}, 1) == 0u);

  const std::vector<Region2D> two{Region2D::box(0, 0, 5, 5), Region2D::box(100, 0, 110, 8)};
  const auto blind = observe(Vec2(2, 2), 6, rng, 0.0);
  CHECK(spcSelect(two, blind, {}, 1) == 1u);
  CHECK(spcSelect(two, {}, {}, 1) == 1u);

  SPCConfig bad;
  bad.kernelBandwidth = 0;
  CHECK_THROWS_AS(spcSelect(two, obs, bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(spcSelect({}, obs, {}, 1), std::invalid_argument);
}

TEST_CASE("spc picks the consistent mode, independent of list order") {
  const std::vector<Region2D> modes{Region2D::box(0, 0, 6, 8), Region2D::box(100, 0, 106, 8)};
  auto rng = makeStream(11, {});
  const auto obs = observe(Vec2(3, 4), 8, rng);
  CHECK(spcSelect(modes, obs, {}, 5) == 0u);
  const std::vector<Region2D> flipped{modes[1], modes[0]};
  CHECK(spcSelect(flipped, obs, {}, 5) == 1u);
  const auto s1 = spcScores(modes, obs, {}, 5), s2 = spcScores(flipped, obs, {}, 5);
  CHECK(s1[0] == s2[1]);
  CHECK(s1[1] == s2[0]);
  CHECK(spcScores(modes, obs, {}, 5) == s1);
}

TEST_CASE("spc success rate on separated modes") {
  int correct = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto rng = makeStream(2024, {static_cast<std::uint64_t>(t)});
    const double ang = 2 * M_PI * uniform01(rng);
    const double sep = 30.5 + 40 * uniform01(rng);
    const Vec2 a(uniform01(rng) * 20 - 10, uniform01(rng) * 20 - 10);
    const Vec2 b = a + sep * Vec2(std::cos(ang), std::sin(ang));
    const double wa = 3 + 6 * uniform01(rng), wb = 3 + 6 * uniform01(rng);
    std::vector<Region2D> modes{Region2D::box(a.x() - wa, a.y() - wa / 2, a.x() + wa, a.y() + wa / 2),
                                Region2D::box(b.x() - wb / 2, b.y() - wb, b.x() + wb / 2, b.y() + wb)};
    const int truthMode = static_cast<int>(uniform01(rng) * 2);
    auto pts = samplePoints(modes[static_cast<std::size_t>(truthMode)], 1, rng);
    const auto obs = observe(pts[0], 6 + static_cast<int>(uniform01(rng) * 10), rng);
    correct += spcSelect(modes, obs, {}, static_cast<std::uint64_t>(t)) == static_cast<std::size_t>(truthMode);
  }
  MESSAGE("spc correct " << correct << " / " << trials);
  CHECK(correct >= 198);
}
