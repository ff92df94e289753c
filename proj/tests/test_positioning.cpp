#include <doctest.h>

#include <algorithm>
#include <random>

#include "urbangnss/oracle.hpp"
#include "urbangnss/positioning.hpp"

using namespace urbangnss;

namespace {

CityModel canyon() {
  auto c = makeCityModel(groundMesh(-300, -300, 300, 300),
                         {{1, boxMesh(Vec2(-20, -10), Vec2(0, 1), 30, 6, 30)},
                          {2, boxMesh(Vec2(20, 5), Vec2(0, 1), 25, 6, 22)},
                          {3, boxMesh(Vec2(-22, 45), Vec2(0, 1), 10, 8, 45)}});
  c.aoi = makeAOI(Vec2(1, 3), 60, StreetFrame());
  return c;
}

std::vector<SatelliteState> sky(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> az(0, 2 * M_PI), el(0.2, 1.3);
  std::vector<SatelliteState> out;
  for (int j = 0; j < n; ++j) out.push_back(satelliteFromAzEl("G" + std::to_string(j), az(rng), el(rng), 2e7));
  return out;
}

// Ground points whose oracle class for every satellite is defined and does not
// change within 0.25 m.
std::vector<Vec2> stableTruths(const CityModel& c, const std::vector<SatelliteState>& sats, int want) {
  std::vector<Vec2> out;
  for (double y = -50; y <= 50 && static_cast<int>(out.size()) < want; y += 7.3) {
    for (double x = -12; x <= 12 && static_cast<int>(out.size()) < want; x += 3.1) {
      const Vec2 p(x, y);
      bool ok = true;
      for (const auto& s : sats) {
        const auto c0 = oracleClassify(p, s, c);
        if (!c0) {
          ok = false;
          break;
        }
        for (int k = 0; k < 12 && ok; ++k) {
          const double a = k * M_PI / 6;
          ok = oracleClassify(p + 0.25 * Vec2(std::cos(a), std::sin(a)), s, c) == c0;
        }
        if (!ok) break;
      }
      if (ok) out.push_back(p);
    }
  }
  return out;
}

double symmetricDifferenceArea(const Region2D& a, const Region2D& b) {
  return difference(a, b).area() + difference(b, a).area();
}

}  // namespace

TEST_CASE("refine step rules") {
  const auto p = Region2D::box(0, 0, 10, 10);
  CHECK(canonicalEqual(refineStep(p, {}, {}, ReceptionCondition::LosOnly), p, 0.0));
  CHECK(refineStep(p, Region2D::box(20, 0, 30, 10), {}, ReceptionCondition::NlosOnly).empty());
  CHECK(canonicalEqual(refineStep(p, {}, Region2D::box(-5, -5, 15, 15), ReceptionCondition::LosNlos), p, 0.0));
  const auto cut = refineStep(p, Region2D::box(0, 0, 5, 10), Region2D::box(5, 0, 8, 10), ReceptionCondition::LosOnly);
  CHECK(canonicalEqual(cut, Region2D::box(8, 0, 10, 10), 1e-6));
}

TEST_CASE("trivial estimates") {
  const auto c = canyon();
  const auto aoi = c.aoi.region();
  const auto none = zsrmEstimate(aoi, std::span<const SatelliteRegions>{}, {});
  CHECK(canonicalEqual(none.region, aoi, 0.0));
  CHECK(canonicalEqual(zsmEstimate(aoi, std::span<const SatelliteRegions>{}, {}).region, aoi, 0.0));

  const auto sats = sky(1, 3);
  const auto regs = computeAllRegions(c, c.aoi, sats, true);
  const auto nlos = zsmEstimate(aoi, regs, std::vector<bool>{false});
  CHECK(symmetricDifferenceArea(nlos.region, regs[0].shadow) < 1e-6);
  const std::vector<ReceptionCondition> ln{ReceptionCondition::LosNlos};
  CHECK(symmetricDifferenceArea(zsrmEstimate(aoi, regs, ln).region, intersection(regs[0].reflection, aoi)) < 1e-6);
  CHECK_THROWS_AS(zsmEstimate(aoi, regs, std::vector<bool>{}), std::invalid_argument);
}

TEST_CASE("single wall, LOS+NLOS satellite") {
  const Vec3 a(0, 0, 0), b(0, 10, 0), cc(0, 10, 20), d(0, 0, 20);
  auto c = makeCityModel(groundMesh(-300, -300, 300, 300), {{1, {{a, b, cc}, {a, cc, d}}}});
  c.aoi = makeAOI(Vec2(0, 0), 60, StreetFrame());
  SatelliteState s;
  s.id = "W";
  s.position = c.buildings[0].planes[0].center + 2e7 * Vec3(1, 0, 1).normalized();
  const std::vector<ReceptionCondition> cond{ReceptionCondition::LosNlos};
  const auto est = zsrmEstimate(c, c.aoi, std::span(&s, 1), cond);
  CHECK(symmetricDifferenceArea(est.region, Region2D::box(0, 0, 20, 10)) < 1e-6);
  REQUIRE(est.modeList.size() == 1);
  CHECK((*est.pointEstimate - Vec2(10, 5)).norm() < 1e-6);
}

TEST_CASE("containment and refinement under oracle labels") {
  const auto c = canyon();
  const auto aoi = c.aoi.region();
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    const auto sats = sky(8, seed);
    const auto regs = computeAllRegions(c, c.aoi, sats, true);
    const auto truths = stableTruths(c, sats, 6);
    REQUIRE_FALSE(truths.empty());
    for (const auto& t : truths) {
      std::vector<ReceptionCondition> cond;
      std::vector<bool> los;
      for (const auto& s : sats) {
        cond.push_back(*oracleClassify(t, s, c));
        los.push_back(isLos(cond.back()));
      }
      const auto zsm = zsmEstimate(aoi, regs, los);
      const auto zsrm = zsrmEstimate(aoi, regs, cond);
      CHECK(contains(zsm.region, t));
      CHECK(contains(zsrm.region, t));
      CHECK(zsrm.region.area() <= zsm.region.area() + 1e-9);
      CHECK(difference(zsrm.region, zsm.region).area() < 1e-6);

      // The sequential fold lands on the same set.
      Region2D folded = aoi;
      for (std::size_t j = 0; j < sats.size(); ++j) {
        folded = refineStep(folded, regs[j].shadow, regs[j].reflection, cond[j]);
      }
      CHECK(symmetricDifferenceArea(folded, zsrm.region) < 1e-6);
    }
  }
}

TEST_CASE("per-satellite admissible sets nest") {
  const auto c = canyon();
  const auto aoi = c.aoi.region();
  const auto sats = sky(6, 9);
  const auto regs = computeAllRegions(c, c.aoi, sats, true);
  for (std::size_t j = 0; j < sats.size(); ++j) {
    for (int k = 0; k < kNumConditions; ++k) {
      const auto cond = conditionFromIndex(k);
      const auto one = std::span(&regs[j], 1);
      const auto zsrm = zsrmEstimate(aoi, one, std::vector{cond}).region;
      const auto zsm = zsmEstimate(aoi, one, std::vector<bool>{isLos(cond)}).region;
      CHECK(difference(zsrm, zsm).area() < 1e-6);
    }
  }
}

TEST_CASE("estimate does not depend on satellite order") {
  const auto c = canyon();
  const auto aoi = c.aoi.region();
  auto sats = sky(9, 21);
  std::vector<ReceptionCondition> cond;
  for (std::size_t j = 0; j < sats.size(); ++j) cond.push_back(conditionFromIndex(static_cast<int>(j % 3)));
  auto regs = computeAllRegions(c, c.aoi, sats, true);
  const auto ref = zsrmEstimate(aoi, regs, cond).region;
  std::vector<std::size_t> perm(sats.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<SatelliteRegions> r2;
    std::vector<ReceptionCondition> c2;
    for (auto i : perm) {
      r2.push_back(regs[i]);
      c2.push_back(cond[i]);
    }
    CHECK(canonicalEqual(zsrmEstimate(aoi, r2, c2).region, ref, 0.0));
  }
}

TEST_CASE("parallel region computation matches serial") {
  const auto c = canyon();
  const auto sats = sky(5, 33);
  PipelineOptions par;
  par.parallel = true;
  const auto a = computeAllRegions(c, c.aoi, sats, true);
  const auto b = computeAllRegions(c, c.aoi, sats, true, par);
  for (std::size_t j = 0; j < sats.size(); ++j) {
    CHECK(canonicalEqual(a[j].shadow, b[j].shadow, 0.0));
    CHECK(canonicalEqual(a[j].reflection, b[j].reflection, 0.0));
  }
}

TEST_CASE("mode selection moves the point estimate") {
  auto set = makePositionSet(unite(Region2D::box(0, 0, 2, 2), Region2D::box(10, 0, 14, 4)));
  REQUIRE(set.modeList.size() == 2);
  CHECK_FALSE(set.selectedMode);
  selectMode(set, 1);
  CHECK((*set.pointEstimate - centroid(set.modeList[1])).norm() < 1e-12);
  CHECK_THROWS_AS(selectMode(set, 2), std::out_of_range);
  CHECK(makePositionSet({}).failed());
}
