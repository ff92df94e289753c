#include <doctest.h>

#include <cmath>

#include "urbangnss/oracle.hpp"
#include "urbangnss/simeval.hpp"

using namespace urbangnss;

namespace {

std::vector<Triangle> wall(const Vec3& a, const Vec3& b, double h) {
  // Quad from a to b, height h; winding chosen by the caller's order.
  const Vec3 up(0, 0, h);
  return {{a, b, b + up}, {a, b + up, a + up}};
}

CanyonParams small(int epochs) {
  CanyonParams p;
  p.epochs = epochs;
  return p;
}

}  // namespace

TEST_CASE("canyon scenario is reproducible and well formed") {
  const auto p = small(12);
  const auto a = generateCanyonScenario(p, 99);
  const auto b = generateCanyonScenario(p, 99);
  CHECK(scenarioToJson(a).dump() == scenarioToJson(b).dump());
  CHECK(scenarioToJson(generateCanyonScenario(p, 100)).dump() != scenarioToJson(a).dump());

  CHECK(a.city.buildings.size() == 6);
  REQUIRE(a.epochs.size() == 12);
  for (std::size_t k = 0; k < a.epochs.size(); ++k) {
    const auto& ep = a.epochs[k];
    CHECK(ep.satellites.size() >= 6);
    CHECK(ep.satellites.size() <= 15);
    // Truth starts on the centerline; nudges stay within a few meters.
    CHECK(std::abs(a.frame.toLocal(ep.truth).x()) <= 6.0 + 1e-9);
    const auto aoi = a.aoi(k).region();
    CHECK(boundaryDistance(aoi, ep.truth) > 35.0);
    for (const auto& o : ep.satellites) {
      CHECK(o.state.position.norm() >= 1e6);
      CHECK((oracleClassify(ep.truth, o.state, a.city) == o.trueCondition));
      CHECK(o.nlosDelay >= 0);
    }
  }
}

TEST_CASE("pseudoranges carry the NLOS delay only for NLOS-only signals") {
  auto p = small(8);
  p.noiseSigma = 0;
  const auto sc = generateCanyonScenario(p, 5);
  int nlos = 0;
  for (const auto& ep : sc.epochs) {
    for (const auto& o : ep.satellites) {
      const double range = (o.state.position - Vec3(ep.truth.x(), ep.truth.y(), 0)).norm();
      const double residual = o.pseudorange - range;
      if (o.trueCondition == ReceptionCondition::NlosOnly) {
        ++nlos;
        CHECK(o.nlosDelay > 0);
        CHECK(residual == doctest::Approx(o.nlosDelay).epsilon(1e-9));
      } else {
        CHECK(std::abs(residual) < 1e-6);
      }
    }
  }
  CHECK(nlos > 0);

  // With noise the LOS residuals are zero-mean with unit spread.
  const auto noisy = generateCanyonScenario(small(40), 5);
  double sum = 0, sq = 0;
  int n = 0;
  for (const auto& ep : noisy.epochs) {
    for (const auto& o : ep.satellites) {
      if (!isLos(o.trueCondition)) continue;
      const double r = o.pseudorange - (o.state.position - Vec3(ep.truth.x(), ep.truth.y(), 0)).norm();
      sum += r;
      sq += r * r;
      ++n;
    }
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::sqrt(sq / n) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("NLOS delay from the mirror geometry") {
  // Wall along the y axis facing +x; receiver 10 m in front of it.
  auto city = makeCityModel(groundMesh(-300, -300, 300, 300), {{1, wall(Vec3(0, -50, 0), Vec3(0, 50, 0), 30)}});
  REQUIRE(city.buildings[0].planes.size() == 1);
  REQUIRE(city.buildings[0].planes[0].unitNormal.x() > 0.99);
  const double el = 1e-3;
  SatelliteState s;
  s.position = 1e8 * Vec3(std::cos(el), 0, std::sin(el));
  const auto d = nlosDelay(Vec2(10, 0), s, city);
  REQUIRE(d);
  CHECK(*d == doctest::Approx(20.0 * std::cos(el)).epsilon(1e-6));
  // Receiver essentially on the wall.
  CHECK(nlosDelay(Vec2(1e-7, 0), s, city).value_or(0.0) < 1e-6);

  // Two walls: the delay is the smaller of the two mirror paths.
  auto two = makeCityModel(groundMesh(-300, -300, 300, 300),
                           {{1, wall(Vec3(0, -60, 0), Vec3(0, 30, 0), 40)}, {2, wall(Vec3(60, -20, 0), Vec3(3, -20, 0), 40)}});
  SatelliteState d45;
  const Vec3 u = Vec3(std::cos(0.5) * std::sqrt(0.5), std::cos(0.5) * std::sqrt(0.5), std::sin(0.5));
  d45.position = 2e7 * u;
  const Vec2 rx(12, -10);
  const auto paths = bouncePaths(two, Vec3(rx.x(), rx.y(), 0), d45);
  REQUIRE(paths.size() == 2);
  const Vec3 nA = two.buildings[0].planes[0].unitNormal, nB = two.buildings[1].planes[0].unitNormal;
  // Planes x = 0 and y = -20; far-field excess path is 2 d (n . u).
  const double viaA = 2 * rx.x() * nA.dot(u), viaB = 2 * (rx.y() + 20) * nB.dot(u);
  CHECK(*nlosDelay(rx, d45, two) == doctest::Approx(std::min(viaA, viaB)).epsilon(1e-5));
  CHECK_FALSE(nlosDelay(Vec2(-20, 20), d45, two));
}

TEST_CASE("epoch metrics") {
  const auto set = [] {
    auto s = makePositionSet(Region2D::box(0, 0, 10, 10));
    selectMode(s, 0);
    return s;
  }();
  const auto m = epochMetrics(set, Vec2(5, 5), StreetFrame(), 3);
  CHECK(m.epoch == 3);
  CHECK_FALSE(m.failed);
  CHECK(m.modeCorrect);
  CHECK(m.horizontalError == doctest::Approx(0.0));
  CHECK(m.crossBound == doctest::Approx(10.0));
  CHECK(m.alongBound == doctest::Approx(10.0));

  const auto off = epochMetrics(set, Vec2(8, 1), StreetFrame(), 0);
  CHECK(off.crossError == doctest::Approx(-3.0));
  CHECK(off.alongError == doctest::Approx(4.0));
  CHECK(off.horizontalError * off.horizontalError ==
        doctest::Approx(off.crossError * off.crossError + off.alongError * off.alongError).epsilon(1e-12));

  // Rotated street: errors follow the frame axes.
  const StreetFrame rot(Vec2(0, 0), Vec2(1, 1));
  const auto r = epochMetrics(set, Vec2(5, 5) + 2 * rot.alongAxis, rot, 0);
  CHECK(r.alongError == doctest::Approx(-2.0));
  CHECK(std::abs(r.crossError) < 1e-12);

  CHECK(epochMetrics(makePositionSet({}), Vec2(0, 0), StreetFrame(), 1).failed);
}

TEST_CASE("aggregate") {
  EpochMetrics a;
  a.horizontalError = 3;
  a.modeCorrect = true;
  auto one = aggregate(std::vector{a});
  CHECK(one.rmsHorizontal == doctest::Approx(3.0));
  EpochMetrics b;
  b.horizontalError = 4;
  CHECK(aggregate(std::vector{a, b}).rmsHorizontal == doctest::Approx(3.5355339059).epsilon(1e-9));
  EpochMetrics f;
  f.failed = true;
  const auto r = aggregate(std::vector{a, b, f, a});
  CHECK(r.failureRate == doctest::Approx(0.25));
  CHECK(r.rmsHorizontal == doctest::Approx(std::sqrt((9 + 16 + 9) / 3.0)));
  CHECK(r.modeAccuracy == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(aggregate(std::vector{f, f}), std::runtime_error);
}

TEST_CASE("ideal runs contain the truth") {
  const auto sc = generateCanyonScenario(small(10), 11);
  RunOptions opt;
  const std::vector<Estimator> both{Estimator::Zsm, Estimator::Zsrm};
  const auto res = evaluate(sc, both, opt);
  for (std::size_t k = 0; k < sc.epochs.size(); ++k) {
    const auto& truth = sc.epochs[k].truth;
    for (int e = 0; e < 2; ++e) {
      CHECK(contains(res[e][k].set.region, truth));
      CHECK(res[e][k].metrics.modeCorrect);
    }
    CHECK(res[1][k].set.region.area() <= res[0][k].set.region.area() + 1e-9);
    CHECK(res[1][k].metrics.crossBound <= res[0][k].metrics.crossBound + 1e-9);
    // runEpoch on its own gives the same answer.
    CHECK(canonicalEqual(runEpoch(sc, k, Estimator::Zsrm, opt).set.region, res[1][k].set.region, 0.0));
  }
}

TEST_CASE("realistic runs use only unanimously voted satellites") {
  const auto sc = generateCanyonScenario(small(4), 12);
  RunOptions opt;
  opt.classification = Classification::Realistic;
  opt.classifierSeed = 77;
  for (std::size_t k = 0; k < sc.epochs.size(); ++k) {
    std::size_t votes3 = 0, votes2 = 0;
    for (std::size_t j = 0; j < sc.epochs[k].satellites.size(); ++j) {
      std::array<ClassifierOutput, 3> out;
      for (std::size_t m = 0; m < 3; ++m) {
        auto rng = makeStream(77, {k, j, m});
        out[m] = noisyClassify(sc.epochs[k].satellites[j].trueCondition, opt.classifiers[m], rng, opt.lambda);
      }
      votes3 += unanimousVote(out).has_value();
      votes2 += unanimousBinaryVote(out).has_value();
    }
    CHECK(runEpoch(sc, k, Estimator::Zsrm, opt).metrics.satellitesUsed == votes3);
    CHECK(runEpoch(sc, k, Estimator::Zsm, opt).metrics.satellitesUsed == votes2);
  }
}

TEST_CASE("evaluation is deterministic and thread independent") {
  const auto sc = generateCanyonScenario(small(6), 13);
  RunOptions opt;
  opt.classification = Classification::Realistic;
  opt.modeSelection = ModeSelection::Spc;
  const std::vector<Estimator> both{Estimator::Zsm, Estimator::Zsrm};
  auto csv = [&](const RunOptions& o) {
    const auto res = evaluate(sc, both, o);
    std::vector<std::vector<EpochMetrics>> m(2);
    for (int e = 0; e < 2; ++e) {
      for (const auto& r : res[e]) m[e].push_back(r.metrics);
    }
    return metricsCsv(both, m);
  };
  const auto first = csv(opt);
  CHECK(first == csv(opt));
  RunOptions par = opt;
  par.pipeline.parallel = true;
  CHECK(first == csv(par));
  CHECK(first.find("zsrm,rms,") != std::string::npos);
}

TEST_CASE("scenario JSON") {
  const auto sc = generateCanyonScenario(small(3), 21);
  const auto j = scenarioToJson(sc);
  CHECK(j.at("schemaVersion") == 1);
  const auto back = parseScenario(j);
  CHECK(scenarioToJson(back).dump() == j.dump());

  auto bad = j;
  bad["epochs"][1]["satellites"][2]["condition"] = "MAYBE";
  CHECK_THROWS_WITH_AS(parseScenario(bad), doctest::Contains("epochs[1].satellites[2].condition"),
                       std::invalid_argument);
  bad = j;
  bad["schemaVersion"] = 2;
  CHECK_THROWS_WITH_AS(parseScenario(bad), doctest::Contains("schemaVersion"), std::invalid_argument);
  bad = j;
  bad["epochs"][0].erase("truth");
  CHECK_THROWS_WITH_AS(parseScenario(bad), doctest::Contains("epochs[0]"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(loadScenario("/no/such/scenario.json"), doctest::Contains("/no/such/scenario.json"),
                       std::runtime_error);
}

TEST_CASE("parameter validation") {
  CanyonParams p;
  p.buildingCount = 9;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = CanyonParams();
  p.satellitesMin = 3;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = CanyonParams();
  p.heightMax = 120;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  const auto round = CanyonParams::fromJson(CanyonParams().toJson());
  CHECK(round.toJson() == CanyonParams().toJson());
  CHECK_THROWS_WITH_AS(CanyonParams::fromJson(nlohmann::json{{"epochs", "many"}}), doctest::Contains("params.epochs"),
                       std::invalid_argument);
}

TEST_CASE("random box scenes") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = randomBoxScene(seed);
    CHECK(a.city.buildings.size() >= 1);
    CHECK(a.city.buildings.size() <= 5);
    CHECK(a.satellites.size() >= 1);
    CHECK(a.satellites.size() <= 8);
    for (const auto& b : a.city.buildings) {
      CHECK(b.bboxMax.z() >= 10 - 1e-9);
      CHECK(b.bboxMax.z() <= 60 + 1e-9);
    }
    for (const auto& s : a.satellites) {
      const double el = std::asin(s.position.z() / s.position.norm());
      CHECK(el >= 10 * M_PI / 180 - 1e-9);
      CHECK(el <= 80 * M_PI / 180 + 1e-9);
    }
    CHECK(cityModelToJson(randomBoxScene(seed).city) == cityModelToJson(a.city));
  }
}
