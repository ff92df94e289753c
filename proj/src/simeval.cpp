#include "urbangnss/simeval.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "urbangnss/oracle.hpp"

namespace urbangnss {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream tags, one per consumer.
enum : std::uint64_t { kTagCity = 1, kTagEpoch = 2, kTagNoise = 3, kTagScene = 4, kTagSpc = 5 };

double lerp(double a, double b, double u) { return a + (b - a) * u; }

int uniformInt(RandomStream& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

nlohmann::json vecJson(const Vec2& v) { return {v.x(), v.y()}; }
nlohmann::json vecJson(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw std::invalid_argument(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(where + ": non-finite value");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vecFrom(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    throw std::invalid_argument(where + ": expected " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

AOI Scenario::aoi(std::size_t epoch) const { return makeAOI(epochs.at(epoch).aoiCenter, aoiHalfWidth, frame); }

void CanyonParams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("canyon parameters: ") + what);
  };
  need(buildingCount >= 2 && buildingCount <= 8, "buildingCount must be in [2, 8]");
  need(streetWidthMin >= 15 && streetWidthMax <= 40 && streetWidthMin <= streetWidthMax,
       "street width must lie in [15, 40] m");
  need(heightMin >= 10 && heightMax <= 80 && heightMin <= heightMax, "heights must lie in [10, 80] m");
  need(satellitesMin >= 6 && satellitesMax <= 15 && satellitesMin <= satellitesMax,
       "satellites per epoch must lie in [6, 15]");
  need(epochs >= 1, "epochs must be positive");
  need(aoiHalfWidth > 0 && aoiOffset >= 0 && aoiOffset + 10 < aoiHalfWidth, "AOI offset must leave the truth inside");
  need(elevationMinDeg > 0 && elevationMaxDeg < 90 && elevationMinDeg <= elevationMaxDeg, "elevations out of range");
  need(satelliteRange >= 1e6, "satellite range must be at least 1e6 m");
  need(noiseSigma >= 0 && truthClearance > 0, "noise and clearance must be nonnegative");
}

nlohmann::json CanyonParams::toJson() const {
  return {{"buildingCount", buildingCount},   {"streetWidthMin", streetWidthMin}, {"streetWidthMax", streetWidthMax},
          {"heightMin", heightMin},           {"heightMax", heightMax},           {"satellitesMin", satellitesMin},
          {"satellitesMax", satellitesMax},   {"epochs", epochs},                 {"aoiHalfWidth", aoiHalfWidth},
          {"aoiOffset", aoiOffset},           {"elevationMinDeg", elevationMinDeg}, {"elevationMaxDeg", elevationMaxDeg},
          {"satelliteRange", satelliteRange}, {"noiseSigma", noiseSigma},         {"biasLosNlos", biasLosNlos},
          {"truthClearance", truthClearance}};
}

CanyonParams CanyonParams::fromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("canyon parameters: expected an object");
  CanyonParams p;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number(j.at(key), std::string("params.") + key);
  };
  auto integer = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw std::invalid_argument(std::string("params.") + key + ": expected an integer");
    dst = j.at(key).get<int>();
  };
  integer("buildingCount", p.buildingCount);
  num("streetWidthMin", p.streetWidthMin);
  num("streetWidthMax", p.streetWidthMax);
  num("heightMin", p.heightMin);
  num("heightMax", p.heightMax);
  integer("satellitesMin", p.satellitesMin);
  integer("satellitesMax", p.satellitesMax);
  integer("epochs", p.epochs);
  num("aoiHalfWidth", p.aoiHalfWidth);
  num("aoiOffset", p.aoiOffset);
  num("elevationMinDeg", p.elevationMinDeg);
  num("elevationMaxDeg", p.elevationMaxDeg);
  num("satelliteRange", p.satelliteRange);
  num("noiseSigma", p.noiseSigma);
  num("biasLosNlos", p.biasLosNlos);
  num("truthClearance", p.truthClearance);
  p.validate();
  return p;
}

std::optional<double> nlosDelay(const Vec2& receiver, const SatelliteState& s, const CityModel& city,
                                double receiverHeight) {
  const auto paths = bouncePaths(city, Vec3(receiver.x(), receiver.y(), receiverHeight), s);
  if (paths.empty()) return std::nullopt;
  double best = paths[0].extraPath;
  for (const auto& p : paths) best = std::min(best, p.extraPath);
  return std::max(0.0, best);
}

bool labelsStable(const CityModel& city, const Vec2& p, std::span<const SatelliteState> sats, double radius) {
  for (const auto& s : sats) {
    const auto c0 = oracleClassify(p, s, city);
    if (!c0) return false;
    for (int ring = 0; ring < 2; ++ring) {
      const int n = ring == 0 ? 16 : 8;
      const double r = ring == 0 ? radius : radius / 2;
      for (int k = 0; k < n; ++k) {
        const double a = 2 * kPi * k / n;
        if (oracleClassify(p + r * Vec2(std::cos(a), std::sin(a)), s, city) != c0) return false;
      }
    }
  }
  return true;
}

Scenario generateCanyonScenario(const CanyonParams& p, std::uint64_t seed) {
  p.validate();
  Scenario sc;
  sc.seed = seed;
  sc.preset = "canyon";
  sc.aoiHalfWidth = p.aoiHalfWidth;

  auto rng = makeStream(seed, {kTagCity});
  const double theta = kPi * uniform01(rng);
  sc.frame = StreetFrame(Vec2::Zero(), Vec2(std::cos(theta), std::sin(theta)));
  const double width = lerp(p.streetWidthMin, p.streetWidthMax, uniform01(rng));

  std::vector<std::pair<int, std::vector<Triangle>>> buildings;
  double span = std::numeric_limits<double>::infinity();
  const std::size_t perSide[2] = {static_cast<std::size_t>(p.buildingCount + 1) / 2,
                                  static_cast<std::size_t>(p.buildingCount) / 2};
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? -1.0 : 1.0;
    const std::size_t n = perSide[side];
    std::vector<double> len, gap, depth, height;
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      len.push_back(lerp(25, 45, uniform01(rng)));
      depth.push_back(lerp(10, 20, uniform01(rng)));
      height.push_back(lerp(p.heightMin, p.heightMax, uniform01(rng)));
      gap.push_back(i + 1 < n ? lerp(2, 8, uniform01(rng)) : 0.0);
      total += len.back() + gap.back();
    }
    span = std::min(span, total);
    double along = -total / 2;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 local(sign * (width / 2 + depth[i] / 2), along + len[i] / 2);
      buildings.push_back({static_cast<int>(buildings.size()) + 1,
                           boxMesh(sc.frame.toWorld(local), sc.frame.alongAxis, len[i] / 2, depth[i] / 2, height[i])});
      along += len[i] + gap[i];
    }
  }
  const double reach = 400.0;
  sc.city = makeCityModel(groundMesh(-reach, -reach, reach, reach), std::move(buildings));

  const double elMin = p.elevationMinDeg * kPi / 180, elMax = p.elevationMaxDeg * kPi / 180;
  const double maxCross = width / 2 - 1.0;
  for (int k = 0; k < p.epochs; ++k) {
    auto erng = makeStream(seed, {kTagEpoch, static_cast<std::uint64_t>(k)});
    ScenarioEpoch ep;
    ep.index = k;
    const double along0 = span * (-0.4 + 0.8 * (k + 0.5) / p.epochs);
    const Vec2 start = sc.frame.toWorld(Vec2(0, along0));
    ep.aoiCenter = start + lerp(-p.aoiOffset, p.aoiOffset, uniform01(erng)) * sc.frame.crossAxis +
                   lerp(-p.aoiOffset, p.aoiOffset, uniform01(erng)) * sc.frame.alongAxis;

    std::vector<SatelliteState> sats;
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      sats.clear();
      const int n = uniformInt(erng, p.satellitesMin, p.satellitesMax);
      for (int j = 0; j < n; ++j) {
        char id[16];
        std::snprintf(id, sizeof id, "G%02d", j + 1);
        // Satellites that neither reach the start point directly nor by one
        // bounce are unobservable and get redrawn.
        for (int tries = 0; tries < 1000; ++tries) {
          auto s = satelliteFromAzEl(id, 2 * kPi * uniform01(erng), lerp(elMin, elMax, uniform01(erng)),
                                     p.satelliteRange, Vec3::Zero());
          if (oracleClassify(start, s, sc.city)) {
            sats.push_back(std::move(s));
            break;
          }
        }
      }
      if (static_cast<int>(sats.size()) != n) continue;
      // Nudge the truth off every label boundary, nearest candidates first.
      for (int ring = 0; ring <= 20 && !placed; ++ring) {
        const int count = ring == 0 ? 1 : 8 * ring;
        for (int i = 0; i < count && !placed; ++i) {
          const double r = 0.3 * ring, a = 2 * kPi * i / count;
          const Vec2 local(r * std::cos(a), along0 + r * std::sin(a));
          if (std::abs(local.x()) > maxCross) continue;
          const Vec2 cand = sc.frame.toWorld(local);
          if (labelsStable(sc.city, cand, sats, p.truthClearance)) {
            ep.truth = cand;
            placed = true;
          }
        }
      }
    }
    if (!placed) throw std::runtime_error("generateCanyonScenario: no stable truth for epoch " + std::to_string(k));

    for (std::size_t j = 0; j < sats.size(); ++j) {
      SatelliteObservation o;
      o.state = sats[j];
      o.trueCondition = *oracleClassify(ep.truth, o.state, sc.city);
      o.nlosDelay = nlosDelay(ep.truth, o.state, sc.city).value_or(0.0);
      auto nrng = makeStream(seed, {kTagNoise, static_cast<std::uint64_t>(k), j});
      const double range = (o.state.position - Vec3(ep.truth.x(), ep.truth.y(), 0)).norm();
      double bias = 0.0;
      if (o.trueCondition == ReceptionCondition::NlosOnly) bias = o.nlosDelay;
      if (o.trueCondition == ReceptionCondition::LosNlos) bias = p.biasLosNlos;
      o.pseudorange = range + bias + p.noiseSigma * normal01(nrng);
      ep.satellites.push_back(std::move(o));
    }
    sc.epochs.push_back(std::move(ep));
  }
  return sc;
}

RandomScene randomBoxScene(std::uint64_t seed) {
  auto rng = makeStream(seed, {kTagScene});
  const int nb = uniformInt(rng, 1, 5);
  struct Placed {
    Vec2 c;
    double r;
  };
  std::vector<Placed> placed;
  std::vector<std::pair<int, std::vector<Triangle>>> boxes;
  while (static_cast<int>(boxes.size()) < nb) {
    const Vec2 c(lerp(-45, 45, uniform01(rng)), lerp(-45, 45, uniform01(rng)));
    const double ang = kPi * uniform01(rng);
    const double ha = lerp(3, 12, uniform01(rng)), hc = lerp(3, 12, uniform01(rng));
    const double h = lerp(10, 60, uniform01(rng));
    const double r = std::hypot(ha, hc);
    bool clear = true;
    for (const auto& q : placed) clear = clear && (q.c - c).norm() > q.r + r + 1.0;
    if (!clear) continue;
    placed.push_back({c, r});
    boxes.push_back({static_cast<int>(boxes.size()) + 1, boxMesh(c, Vec2(std::cos(ang), std::sin(ang)), ha, hc, h)});
  }
  RandomScene out;
  out.city = makeCityModel(groundMesh(-300, -300, 300, 300), std::move(boxes));
  out.city.aoi = makeAOI(Vec2::Zero(), 60, StreetFrame());
  const int ns = uniformInt(rng, 1, 8);
  for (int j = 0; j < ns; ++j) {
    out.satellites.push_back(satelliteFromAzEl("S" + std::to_string(j + 1), 2 * kPi * uniform01(rng),
                                               lerp(10, 80, uniform01(rng)) * kPi / 180, 2e7));
  }
  return out;
}

nlohmann::json scenarioToJson(const Scenario& s) {
  nlohmann::json j;
  j["schemaVersion"] = kScenarioSchemaVersion;
  j["preset"] = s.preset;
  j["seed"] = s.seed;
  j["frame"] = {{"origin", vecJson(s.frame.origin)}, {"alongAxis", vecJson(s.frame.alongAxis)}};
  j["aoiHalfWidth"] = s.aoiHalfWidth;
  j["city"] = cityModelToJson(s.city);
  j["epochs"] = nlohmann::json::array();
  for (const auto& ep : s.epochs) {
    nlohmann::json ej;
    ej["index"] = ep.index;
    ej["truth"] = vecJson(ep.truth);
    ej["aoiCenter"] = vecJson(ep.aoiCenter);
    ej["satellites"] = nlohmann::json::array();
    for (const auto& o : ep.satellites) {
      ej["satellites"].push_back({{"id", o.state.id},
                                  {"position", vecJson(o.state.position)},
                                  {"azimuth", o.state.azimuth},
                                  {"elevation", o.state.elevation},
                                  {"condition", std::string(toString(o.trueCondition))},
                                  {"pseudorange", o.pseudorange},
                                  {"nlosDelay", o.nlosDelay}});
    }
    j["epochs"].push_back(std::move(ej));
  }
  return j;
}

Scenario parseScenario(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario: expected an object");
  const auto& ver = field(j, "schemaVersion", "scenario");
  if (!ver.is_number_integer() || ver.get<int>() != kScenarioSchemaVersion) {
    throw std::invalid_argument("schemaVersion: unsupported (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }
  Scenario s;
  s.preset = j.value("preset", std::string());
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw std::invalid_argument("seed: expected a nonnegative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  const auto& fr = field(j, "frame", "scenario");
  s.frame = StreetFrame(vecFrom<2>(field(fr, "origin", "frame"), "frame.origin"),
                        vecFrom<2>(field(fr, "alongAxis", "frame"), "frame.alongAxis"));
  s.aoiHalfWidth = number(field(j, "aoiHalfWidth", "scenario"), "aoiHalfWidth");
  if (!(s.aoiHalfWidth > 0)) throw std::invalid_argument("aoiHalfWidth: must be positive");
  s.city = parseCityModel(field(j, "city", "scenario"));
  const auto& eps = field(j, "epochs", "scenario");
  if (!eps.is_array()) throw std::invalid_argument("epochs: expected an array");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const std::string ew = "epochs[" + std::to_string(k) + "]";
    const auto& ej = eps[k];
    ScenarioEpoch ep;
    ep.index = static_cast<int>(k);
    if (ej.contains("index")) ep.index = static_cast<int>(number(ej.at("index"), ew + ".index"));
    ep.truth = vecFrom<2>(field(ej, "truth", ew), ew + ".truth");
    ep.aoiCenter = vecFrom<2>(field(ej, "aoiCenter", ew), ew + ".aoiCenter");
    const auto& sats = field(ej, "satellites", ew);
    if (!sats.is_array()) throw std::invalid_argument(ew + ".satellites: expected an array");
    for (std::size_t i = 0; i < sats.size(); ++i) {
      const std::string sw = ew + ".satellites[" + std::to_string(i) + "]";
      const auto& sj = sats[i];
      SatelliteObservation o;
      const auto& id = field(sj, "id", sw);
      if (!id.is_string()) throw std::invalid_argument(sw + ".id: expected a string");
      o.state.id = id.get<std::string>();
      o.state.position = vecFrom<3>(field(sj, "position", sw), sw + ".position");
      if (o.state.position.norm() < 1e6) throw std::invalid_argument(sw + ".position: satellite closer than 1e6 m");
      if (sj.contains("azimuth")) o.state.azimuth = number(sj.at("azimuth"), sw + ".azimuth");
      if (sj.contains("elevation")) o.state.elevation = number(sj.at("elevation"), sw + ".elevation");
      const auto& cond = field(sj, "condition", sw);
      const auto c = cond.is_string() ? conditionFromString(cond.get<std::string>()) : std::nullopt;
      if (!c) throw std::invalid_argument(sw + ".condition: expected NLOS_ONLY, LOS_ONLY or LOS_NLOS");
      o.trueCondition = *c;
      o.pseudorange = number(field(sj, "pseudorange", sw), sw + ".pseudorange");
      o.nlosDelay = sj.contains("nlosDelay") ? number(sj.at("nlosDelay"), sw + ".nlosDelay") : 0.0;
      if (o.nlosDelay < 0) throw std::invalid_argument(sw + ".nlosDelay: must be nonnegative");
      ep.satellites.push_back(std::move(o));
    }
    s.epochs.push_back(std::move(ep));
  }
  return s;
}

Scenario loadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  try {
    return parseScenario(j);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void saveScenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenarioToJson(s).dump(1) << "\n";
}

std::string_view toString(Estimator e) { return e == Estimator::Zsm ? "zsm" : "zsrm"; }
std::string_view toString(Classification c) { return c == Classification::Ideal ? "ideal" : "realistic"; }
std::string_view toString(ModeSelection m) { return m == ModeSelection::Ideal ? "ideal" : "spc"; }

EpochInputs prepareEpoch(const Scenario& sc, std::size_t epoch, const RunOptions& opt, bool needReflections) {
  const auto& ep = sc.epochs.at(epoch);
  EpochInputs in;
  std::vector<SatelliteState> states;
  for (std::size_t j = 0; j < ep.satellites.size(); ++j) {
    const auto& o = ep.satellites[j];
    states.push_back(o.state);
    RangeObservation ro;
    ro.state = o.state;
    ro.pseudorange = o.pseudorange;
    if (opt.classification == Classification::Ideal) {
      in.zsmSatellites.push_back(j);
      in.zsmLos.push_back(isLos(o.trueCondition));
      in.zsrmSatellites.push_back(j);
      in.zsrmConditions.push_back(o.trueCondition);
      ro.pLos = isLos(o.trueCondition) ? 1.0 : 0.0;
    } else {
      std::array<ClassifierOutput, 3> out;
      for (std::size_t m = 0; m < 3; ++m) {
        auto rng = makeStream(opt.classifierSeed, {static_cast<std::uint64_t>(epoch), j, m});
        out[m] = noisyClassify(o.trueCondition, opt.classifiers[m], rng, opt.lambda);
      }
      if (const auto v = unanimousBinaryVote(out)) {
        in.zsmSatellites.push_back(j);
        in.zsmLos.push_back(*v);
      }
      if (const auto v = unanimousVote(out)) {
        in.zsrmSatellites.push_back(j);
        in.zsrmConditions.push_back(*v);
      }
      ro.pLos = (out[0].pLos() + out[1].pLos() + out[2].pLos()) / 3.0;
    }
    in.rangeObservations.push_back(std::move(ro));
  }
  in.regions = computeAllRegions(sc.city, sc.aoi(epoch), states, needReflections, opt.pipeline);
  return in;
}

EpochMetrics epochMetrics(const PositionSet& set, const Vec2& truth, const StreetFrame& frame, int epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  if (set.failed()) {
    m.failed = true;
    return m;
  }
  m.modeCount = set.modeList.size();
  m.regionArea = set.region.area();
  const Region2D& chosen = set.selectedMode ? set.modeList[*set.selectedMode] : set.region;
  const Vec2 d = frame.toLocal(*set.pointEstimate) - frame.toLocal(truth);
  m.crossError = d.x();
  m.alongError = d.y();
  m.horizontalError = std::hypot(d.x(), d.y());
  const auto [cb, ab] = bounds(chosen, frame);
  m.crossBound = cb;
  m.alongBound = ab;
  m.modeCorrect = set.selectedMode.has_value() && contains(chosen, truth, tol::geom);
  return m;
}

EpochResult runEstimator(const Scenario& sc, std::size_t epoch, const EpochInputs& in, Estimator est,
                         const RunOptions& opt) {
  const auto& ep = sc.epochs.at(epoch);
  const Region2D aoi = sc.aoi(epoch).region();
  std::vector<SatelliteRegions> regs;
  EpochResult r;
  if (est == Estimator::Zsm) {
    for (auto j : in.zsmSatellites) regs.push_back(in.regions[j]);
    r.set = zsmEstimate(aoi, regs, in.zsmLos);
  } else {
    for (auto j : in.zsrmSatellites) regs.push_back(in.regions[j]);
    r.set = zsrmEstimate(aoi, regs, in.zsrmConditions);
  }
  if (!r.set.failed()) {
    std::size_t pick = 0;
    if (opt.modeSelection == ModeSelection::Ideal) {
      if (const auto hit = idealSelect(r.set.modeList, ep.truth)) {
        pick = *hit;
      } else {
        // Truth outside every mode (misclassification): take the nearest one.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.set.modeList.size(); ++i) {
          const double d = boundaryDistance(r.set.modeList[i], ep.truth);
          if (d < best) {
            best = d;
            pick = i;
          }
        }
      }
    } else {
      auto srng = makeStream(opt.spcSeed, {kTagSpc, static_cast<std::uint64_t>(epoch)});
      pick = spcSelect(r.set.modeList, in.rangeObservations, opt.spc, srng());
    }
    selectMode(r.set, pick);
  }
  r.metrics = epochMetrics(r.set, ep.truth, sc.frame, ep.index);
  r.metrics.satellitesUsed = regs.size();
  return r;
}

EpochResult runEpoch(const Scenario& sc, std::size_t epoch, Estimator est, const RunOptions& opt) {
  const auto in = prepareEpoch(sc, epoch, opt, est == Estimator::Zsrm);
  return runEstimator(sc, epoch, in, est, opt);
}

std::vector<std::vector<EpochResult>> evaluate(const Scenario& sc, std::span<const Estimator> estimators,
                                               const RunOptions& opt) {
  bool needReflections = false;
  for (auto e : estimators) needReflections = needReflections || e == Estimator::Zsrm;
  const std::size_t n = sc.epochs.size();
  std::vector<std::vector<EpochResult>> out(estimators.size(), std::vector<EpochResult>(n));
  RunOptions inner = opt;
  inner.pipeline.parallel = false;
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) if (opt.pipeline.parallel)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto e = static_cast<std::size_t>(k);
    try {
      const auto in = prepareEpoch(sc, e, inner, needReflections);
      for (std::size_t i = 0; i < estimators.size(); ++i) out[i][e] = runEstimator(sc, e, in, estimators[i], inner);
    } catch (...) {
      errors[e] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

AggregateReport aggregate(std::span<const EpochMetrics> metrics) {
  AggregateReport r;
  r.epochs = metrics.size();
  double h = 0, c = 0, a = 0, cb = 0, ab = 0;
  std::size_t ok = 0, correct = 0;
  for (const auto& m : metrics) {
    if (m.failed) {
      ++r.failed;
      continue;
    }
    ++ok;
    correct += m.modeCorrect;
    h += m.horizontalError * m.horizontalError;
    c += m.crossError * m.crossError;
    a += m.alongError * m.alongError;
    cb += m.crossBound * m.crossBound;
    ab += m.alongBound * m.alongBound;
  }
  if (ok == 0) throw std::runtime_error("aggregate: every epoch failed");
  const double n = static_cast<double>(ok);
  r.failureRate = static_cast<double>(r.failed) / static_cast<double>(r.epochs);
  r.modeAccuracy = static_cast<double>(correct) / n;
  r.rmsHorizontal = std::sqrt(h / n);
  r.rmsCross = std::sqrt(c / n);
  r.rmsAlong = std::sqrt(a / n);
  r.rmsCrossBound = std::sqrt(cb / n);
  r.rmsAlongBound = std::sqrt(ab / n);
  return r;
}

std::string metricsCsv(std::span<const Estimator> estimators,
                       const std::vector<std::vector<EpochMetrics>>& perEstimator) {
  std::ostringstream out;
  out << "estimator,epoch,failed,mode_correct,satellites,modes,area_m2,horizontal_m,cross_m,along_m,cross_bound_m,"
         "along_bound_m\n";
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (const auto& m : perEstimator.at(i)) {
      out << toString(estimators[i]) << ',' << m.epoch << ',' << m.failed << ',' << m.modeCorrect << ','
          << m.satellitesUsed << ',' << m.modeCount << ',' << fmt(m.regionArea) << ',' << fmt(m.horizontalError)
          << ',' << fmt(m.crossError) << ',' << fmt(m.alongError) << ',' << fmt(m.crossBound) << ','
          << fmt(m.alongBound) << '\n';
    }
  }
  // Summary rows: failure rate and mode accuracy in the flag columns, RMS in the metric columns.
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    out << toString(estimators[i]) << ",rms,";
    try {
      const auto r = aggregate(perEstimator.at(i));
      out << fmt(r.failureRate) << ',' << fmt(r.modeAccuracy) << ",,,," << fmt(r.rmsHorizontal) << ','
          << fmt(r.rmsCross) << ',' << fmt(r.rmsAlong) << ',' << fmt(r.rmsCrossBound) << ','
          << fmt(r.rmsAlongBound) << '\n';
    } catch (const std::runtime_error&) {
      out << fmt(1.0) << ",,,,,,,,,\n";
    }
  }
  return out.str();
}

std::string comparisonTable(std::span<const Estimator> estimators, std::span<const AggregateReport> reports) {
  std::ostringstream out;
  out << "| Method | Horizontal error (m) | Cross error (m) | Along error (m) | Cross bound (m) | Along bound (m) | "
         "Failure rate | Mode accuracy |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  auto two = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    std::string name(toString(estimators[i]));
    for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const auto& r = reports[i];
    out << "| " << name << " | " << two(r.rmsHorizontal) << " | " << two(r.rmsCross) << " | " << two(r.rmsAlong)
        << " | " << two(r.rmsCrossBound) << " | " << two(r.rmsAlongBound) << " | " << two(100 * r.failureRate)
        << "% | " << two(100 * r.modeAccuracy) << "% |\n";
  }
  if (reports.size() == 2) {
    auto imp = [&](double a, double b) { return a > 0 ? two(100.0 * (a - b) / a) + "%" : std::string("n/a"); };
    const auto& a = reports[0];
    const auto& b = reports[1];
    out << "| Improvement | " << imp(a.rmsHorizontal, b.rmsHorizontal) << " | " << imp(a.rmsCross, b.rmsCross) << " | "
        << imp(a.rmsAlong, b.rmsAlong) << " | " << imp(a.rmsCrossBound, b.rmsCrossBound) << " | "
        << imp(a.rmsAlongBound, b.rmsAlongBound) << " | | |\n";
  }
  return out.str();
}

}  // namespace urbangnss
