// Command-line frontend: scenario generation, region export, estimation runs,
// evaluation and oracle verification. Every output goes under --out.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbangnss/geojson.hpp"
#include "urbangnss/kernels.hpp"
#include "urbangnss/simeval.hpp"

namespace fs = std::filesystem;
using namespace urbangnss;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAllFailed = 2;
constexpr int kExitMismatch = 3;

// Thrown for bad arguments or unreadable inputs; maps to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string scenario;
  std::string estimator = "both";
  std::string classification = "ideal";
  std::string modeSelection = "ideal";
  std::uint64_t seed = 1;
  std::string out = "out";
  double grid = 0.5;
  double epsilon = 1e5;
  std::string params;  // canyon parameter JSON for generate
  int epochs = -1;
  int epoch = -1;
  int scenes = 0;
  bool serial = false;
};

void writeFile(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dumpJson(const nlohmann::json& j) { return j.dump(1) + "\n"; }

Scenario readScenario(const Args& a) {
  if (a.scenario.empty()) throw ConfigError("--scenario is required");
  try {
    return loadScenario(a.scenario);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Estimator> parseEstimators(const std::string& s) {
  if (s == "zsm") return {Estimator::Zsm};
  if (s == "zsrm") return {Estimator::Zsrm};
  if (s == "both") return {Estimator::Zsm, Estimator::Zsrm};
  throw ConfigError("--estimator must be zsm, zsrm or both, got '" + s + "'");
}

RunOptions runOptions(const Args& a) {
  RunOptions opt;
  if (a.classification == "ideal") {
    opt.classification = Classification::Ideal;
  } else if (a.classification == "realistic") {
    opt.classification = Classification::Realistic;
  } else {
    throw ConfigError("--classification must be ideal or realistic, got '" + a.classification + "'");
  }
  if (a.modeSelection == "ideal") {
    opt.modeSelection = ModeSelection::Ideal;
  } else if (a.modeSelection == "spc") {
    opt.modeSelection = ModeSelection::Spc;
  } else {
    throw ConfigError("--mode-selection must be ideal or spc, got '" + a.modeSelection + "'");
  }
  if (!(a.epsilon > 0)) throw ConfigError("--epsilon must be positive");
  opt.classifierSeed = a.seed;
  opt.spcSeed = a.seed;
  opt.pipeline.epsilon = a.epsilon;
  opt.pipeline.parallel = !a.serial;
  return opt;
}

std::vector<std::size_t> selectedEpochs(const Scenario& sc, int epoch) {
  std::vector<std::size_t> ks;
  if (epoch >= 0) {
    if (static_cast<std::size_t>(epoch) >= sc.epochs.size()) {
      throw ConfigError("--epoch " + std::to_string(epoch) + " out of range (scenario has " +
                        std::to_string(sc.epochs.size()) + " epochs)");
    }
    ks.push_back(static_cast<std::size_t>(epoch));
  } else {
    for (std::size_t k = 0; k < sc.epochs.size(); ++k) ks.push_back(k);
  }
  return ks;
}

nlohmann::json pointFeature(const Vec2& p, nlohmann::json props) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.x(), p.y()}}}},
          {"properties", std::move(props)}};
}

nlohmann::json featureCollection(nlohmann::json features) {
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

nlohmann::json estimateFeatures(const Scenario& sc, std::size_t k, Estimator est, const EpochResult& r) {
  const std::string name(toString(est));
  auto feats = nlohmann::json::array();
  feats.push_back(toGeoJSONFeature(sc.aoi(k).region(), {{"kind", "aoi"}, {"epoch", k}}));
  feats.push_back(toGeoJSONFeature(r.set.region, {{"kind", "region"}, {"estimator", name}, {"epoch", k}}));
  for (std::size_t i = 0; i < r.set.modeList.size(); ++i) {
    const bool sel = r.set.selectedMode && *r.set.selectedMode == i;
    feats.push_back(toGeoJSONFeature(r.set.modeList[i],
                                     {{"kind", "mode"}, {"estimator", name}, {"epoch", k}, {"index", i}, {"selected", sel}}));
  }
  feats.push_back(pointFeature(sc.epochs[k].truth, {{"kind", "truth"}, {"epoch", k}}));
  if (r.set.pointEstimate) {
    feats.push_back(pointFeature(*r.set.pointEstimate, {{"kind", "estimate"}, {"estimator", name}, {"epoch", k}}));
  }
  return feats;
}

std::vector<std::vector<EpochMetrics>> metricsOf(const std::vector<std::vector<EpochResult>>& res) {
  std::vector<std::vector<EpochMetrics>> out;
  for (const auto& row : res) {
    out.emplace_back();
    for (const auto& r : row) out.back().push_back(r.metrics);
  }
  return out;
}

bool allFailed(const std::vector<EpochMetrics>& m) {
  for (const auto& e : m) {
    if (!e.failed) return false;
  }
  return true;
}

int cmdGenerate(const Args& a) {
  CanyonParams p;
  if (!a.params.empty()) {
    std::ifstream f(a.params);
    if (!f) throw ConfigError("cannot open " + a.params);
    try {
      p = CanyonParams::fromJson(nlohmann::json::parse(f));
    } catch (const std::exception& e) {
      throw ConfigError(a.params + ": " + e.what());
    }
  }
  if (a.epochs >= 0) p.epochs = a.epochs;
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto sc = generateCanyonScenario(p, a.seed);
  const fs::path path = fs::path(a.out) / "scenario.json";
  fs::create_directories(path.parent_path());
  saveScenario(sc, path);
  std::cout << "wrote " << path.string() << " (" << sc.epochs.size() << " epochs, " << sc.city.buildings.size()
            << " buildings)\n";
  return kExitOk;
}

int cmdRegions(const Args& a) {
  const auto sc = readScenario(a);
  const auto opt = runOptions(a);
  for (std::size_t k : selectedEpochs(sc, a.epoch)) {
    const auto& ep = sc.epochs[k];
    std::vector<SatelliteState> sats;
    for (const auto& o : ep.satellites) sats.push_back(o.state);
    const auto regions = computeAllRegions(sc.city, sc.aoi(k), sats, true, opt.pipeline);
    auto feats = nlohmann::json::array();
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const std::string cond(toString(ep.satellites[j].trueCondition));
      feats.push_back(toGeoJSONFeature(
          regions[j].shadow, {{"kind", "shadow"}, {"satellite", regions[j].satelliteId}, {"condition", cond}}));
      feats.push_back(toGeoJSONFeature(
          regions[j].reflection, {{"kind", "reflection"}, {"satellite", regions[j].satelliteId}, {"condition", cond}}));
    }
    char name[48];
    std::snprintf(name, sizeof name, "regions_epoch%03zu.geojson", k);
    writeFile(fs::path(a.out) / name, dumpJson(featureCollection(std::move(feats))));
  }
  std::cout << "wrote regions to " << a.out << "\n";
  return kExitOk;
}

// Shared by estimate and eval: runs the estimators, writes the CSV and the
// per-epoch GeoJSON, and returns the results.
std::vector<std::vector<EpochResult>> runAndWrite(const Args& a, const Scenario& sc,
                                                  const std::vector<Estimator>& ests, const RunOptions& opt) {
  const auto res = evaluate(sc, ests, opt);
  writeFile(fs::path(a.out) / "metrics.csv", metricsCsv(ests, metricsOf(res)));
  for (std::size_t i = 0; i < ests.size(); ++i) {
    for (std::size_t k = 0; k < sc.epochs.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_epoch%03zu.geojson", std::string(toString(ests[i])).c_str(), k);
      writeFile(fs::path(a.out) / "epochs" / name, dumpJson(featureCollection(estimateFeatures(sc, k, ests[i], res[i][k]))));
    }
  }
  return res;
}

int cmdEstimate(const Args& a) {
  const auto sc = readScenario(a);
  const auto ests = parseEstimators(a.estimator);
  const auto res = runAndWrite(a, sc, ests, runOptions(a));
  int code = kExitOk;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    std::size_t failed = 0;
    for (const auto& r : res[i]) failed += r.metrics.failed;
    std::cout << toString(ests[i]) << ": " << failed << " of " << res[i].size() << " epochs failed\n";
    if (allFailed(metricsOf(res)[i])) code = kExitAllFailed;
  }
  return code;
}

int cmdEval(const Args& a) {
  const auto sc = readScenario(a);
  const auto ests = parseEstimators(a.estimator);
  const auto res = runAndWrite(a, sc, ests, runOptions(a));
  const auto metrics = metricsOf(res);
  std::vector<AggregateReport> reports;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    if (allFailed(metrics[i])) {
      std::cerr << "error: every epoch failed for " << toString(ests[i]) << "\n";
      return kExitAllFailed;
    }
    reports.push_back(aggregate(metrics[i]));
  }
  const auto table = comparisonTable(ests, reports);
  writeFile(fs::path(a.out) / "comparison.md", table);
  std::cout << table;
  return kExitOk;
}

// Grid comparison of the shadow and reflection regions against the ray oracle,
// over a scenario's epochs or over seeded random box scenes.
int cmdVerify(const Args& a) {
  if (!(a.grid > 0)) throw ConfigError("--grid must be positive");
  const auto opt = runOptions(a);
  struct Case {
    std::string label;
    CityModel city;
    AOI aoi;
    std::vector<SatelliteState> sats;
  };
  std::vector<Case> cases;
  if (a.scenes > 0) {
    for (int i = 0; i < a.scenes; ++i) {
      const auto seed = a.seed + static_cast<std::uint64_t>(i);
      auto sc = randomBoxScene(seed);
      AOI aoi = sc.city.aoi;
      cases.push_back({"scene" + std::to_string(seed), std::move(sc.city), std::move(aoi), std::move(sc.satellites)});
    }
  } else {
    const auto sc = readScenario(a);
    for (std::size_t k : selectedEpochs(sc, a.epoch)) {
      std::vector<SatelliteState> sats;
      for (const auto& o : sc.epochs[k].satellites) sats.push_back(o.state);
      cases.push_back({"epoch" + std::to_string(k), sc.city, sc.aoi(k), std::move(sats)});
    }
  }

  std::string csv = "case,satellite,kind,compared,banded,mismatches\n";
  std::size_t total = 0;
  for (const auto& c : cases) {
    const auto pts = kernels::aoiGridPoints(c.aoi, a.grid);
    const auto regions = computeAllRegions(c.city, c.aoi, c.sats, true, opt.pipeline);
    for (std::size_t j = 0; j < c.sats.size(); ++j) {
      const auto codes = kernels::oracleGridParallel(c.city, pts, c.sats[j], opt.pipeline.receiverHeight);
      const auto sh = kernels::compareWithOracle(
          regions[j].shadow, pts, codes, [](std::uint8_t v) { return !(v & kernels::kLosBit); }, 0.05);
      const auto rf = kernels::compareWithOracle(
          regions[j].reflection, pts, codes,
          [](std::uint8_t v) { return (v & kernels::kLosBit) && (v & kernels::kBounceBit); }, 0.10);
      for (const auto& [kind, eq] : {std::pair{"shadow", sh}, std::pair{"reflection", rf}}) {
        csv += c.label + "," + c.sats[j].id + "," + kind + "," + std::to_string(eq.compared) + "," +
               std::to_string(eq.banded) + "," + std::to_string(eq.mismatches) + "\n";
        total += eq.mismatches;
      }
    }
  }
  writeFile(fs::path(a.out) / "verify.csv", csv);
  std::cout << cases.size() << " cases, " << total << " mismatches\n";
  return total == 0 ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-based urban GNSS positioning with shadow and reflection matching"};
  app.require_subcommand(1);
  Args a;

  auto addOut = [&](CLI::App* s) { s->add_option("--out", a.out, "Output directory")->capture_default_str(); };
  auto addRun = [&](CLI::App* s) {
    s->add_option("--scenario", a.scenario, "Scenario JSON file")->required();
    s->add_option("--seed", a.seed, "Seed for classifier and SPC streams")->capture_default_str();
    s->add_option("--epsilon", a.epsilon, "Sweep length of shadow and reflection volumes, m")->capture_default_str();
    s->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
    addOut(s);
  };
  auto addEstimation = [&](CLI::App* s) {
    addRun(s);
    s->add_option("--estimator", a.estimator, "zsm, zsrm or both")->capture_default_str();
    s->add_option("--classification", a.classification, "ideal or realistic")->capture_default_str();
    s->add_option("--mode-selection", a.modeSelection, "ideal or spc")->capture_default_str();
  };

  auto* gen = app.add_subcommand("generate", "Generate a street-canyon scenario");
  gen->add_option("--seed", a.seed, "Scenario seed")->capture_default_str();
  gen->add_option("--params", a.params, "Canyon parameter JSON");
  gen->add_option("--epochs", a.epochs, "Override the epoch count");
  addOut(gen);

  auto* reg = app.add_subcommand("regions", "Export per-satellite shadow and reflection regions as GeoJSON");
  addRun(reg);
  reg->add_option("--epoch", a.epoch, "Single epoch (default: all)");

  auto* est = app.add_subcommand("estimate", "Per-epoch position sets as GeoJSON plus metrics CSV");
  addEstimation(est);

  auto* ev = app.add_subcommand("eval", "Metrics CSV and RMS comparison table");
  addEstimation(ev);

  auto* ver = app.add_subcommand("verify", "Compare regions with the ray-cast oracle on a grid");
  ver->add_option("--scenario", a.scenario, "Scenario JSON file");
  ver->add_option("--scenes", a.scenes, "Use this many random box scenes instead of a scenario");
  ver->add_option("--seed", a.seed, "First random scene seed")->capture_default_str();
  ver->add_option("--grid", a.grid, "Grid spacing, m")->capture_default_str();
  ver->add_option("--epoch", a.epoch, "Single epoch (default: all)");
  ver->add_option("--epsilon", a.epsilon, "Sweep length of shadow and reflection volumes, m")->capture_default_str();
  ver->add_flag("--serial", a.serial, "Disable OpenMP parallelism");
  addOut(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) return cmdGenerate(a);
    if (*reg) return cmdRegions(a);
    if (*est) return cmdEstimate(a);
    if (*ev) return cmdEval(a);
    if (*ver) return cmdVerify(a);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return kExitOk;
}
