#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/modeselect.hpp"
#include "urbangnss/positioning.hpp"
#include "urbangnss/reception.hpp"
#include "urbangnss/sigclass.hpp"

namespace urbangnss {

inline constexpr int kScenarioSchemaVersion = 1;

struct SatelliteObservation {
  SatelliteState state;
  ReceptionCondition trueCondition = ReceptionCondition::LosOnly;
  double pseudorange = 0.0;  // m
  double nlosDelay = 0.0;    // shortest single-bounce excess path, 0 without a bounce
};

struct ScenarioEpoch {
  int index = 0;
  Vec2 truth = Vec2::Zero();
  Vec2 aoiCenter = Vec2::Zero();
  std::vector<SatelliteObservation> satellites;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::string preset;
  CityModel city;
  StreetFrame frame;
  double aoiHalfWidth = 60.0;
  std::vector<ScenarioEpoch> epochs;

  AOI aoi(std::size_t epoch) const;
};

/// Street canyon: buildings on both sides of a straight street, receiver
/// walking the centerline.
struct CanyonParams {
  int buildingCount = 6;  // split over the two sides, 2..8
  double streetWidthMin = 15.0, streetWidthMax = 40.0;
  double heightMin = 10.0, heightMax = 80.0;
  int satellitesMin = 6, satellitesMax = 15;
  int epochs = 100;
  double aoiHalfWidth = 60.0;
  double aoiOffset = 10.0;  // max AOI center offset from the truth per axis
  double elevationMinDeg = 10.0, elevationMaxDeg = 80.0;
  double satelliteRange = 2e7;
  double noiseSigma = 1.0;     // pseudorange noise, m
  double biasLosNlos = 0.0;    // pseudorange bias of LOS+NLOS signals, m
  double truthClearance = 0.25;  // labels must not change within this radius of the truth

  void validate() const;
  nlohmann::json toJson() const;
  static CanyonParams fromJson(const nlohmann::json& j);
};

Scenario generateCanyonScenario(const CanyonParams& params, std::uint64_t seed);

/// Shortest excess path over the valid single-bounce paths, if any exists.
std::optional<double> nlosDelay(const Vec2& receiver, const SatelliteState& s, const CityModel& city,
                                double receiverHeight = 0.0);

/// True when every satellite is observable at p and no label changes on two
/// rings of radius `radius` and radius/2 around p.
bool labelsStable(const CityModel& city, const Vec2& p, std::span<const SatelliteState> sats, double radius);

/// Random scene for oracle checks: 1-5 boxes, heights 10-60 m, 1-8 satellites
/// at elevations 10-80 deg, AOI 120 x 120 m at the origin.
struct RandomScene {
  CityModel city;
  std::vector<SatelliteState> satellites;
};
RandomScene randomBoxScene(std::uint64_t seed);

nlohmann::json scenarioToJson(const Scenario& s);
Scenario parseScenario(const nlohmann::json& j);
Scenario loadScenario(const std::filesystem::path& path);
void saveScenario(const Scenario& s, const std::filesystem::path& path);

enum class Estimator { Zsm, Zsrm };
enum class Classification { Ideal, Realistic };
enum class ModeSelection { Ideal, Spc };

std::string_view toString(Estimator e);
std::string_view toString(Classification c);
std::string_view toString(ModeSelection m);

struct RunOptions {
  Classification classification = Classification::Ideal;
  ModeSelection modeSelection = ModeSelection::Ideal;
  std::uint64_t classifierSeed = 1;
  std::uint64_t spcSeed = 1;
  SPCConfig spc;
  std::array<ConfusionMatrix, 3> classifiers = defaultClassifiers();
  double lambda = 0.3;
  PipelineOptions pipeline;
};

/// Labels and regions of one epoch, shared by both estimators.
struct EpochInputs {
  std::vector<std::size_t> zsmSatellites;  // indices into the epoch's satellites
  std::vector<bool> zsmLos;
  std::vector<std::size_t> zsrmSatellites;
  std::vector<ReceptionCondition> zsrmConditions;
  std::vector<RangeObservation> rangeObservations;  // every satellite, with P(LOS)
  std::vector<SatelliteRegions> regions;            // every satellite; reflections only when needed
};

EpochInputs prepareEpoch(const Scenario& sc, std::size_t epoch, const RunOptions& opt, bool needReflections);

struct EpochMetrics {
  int epoch = 0;
  double horizontalError = 0.0;
  double crossError = 0.0;
  double alongError = 0.0;
  double crossBound = 0.0;
  double alongBound = 0.0;
  bool failed = false;
  bool modeCorrect = false;
  std::size_t satellitesUsed = 0;
  std::size_t modeCount = 0;
  double regionArea = 0.0;
};

struct EpochResult {
  EpochMetrics metrics;
  PositionSet set;
};

/// Errors of `set` against the truth in the street frame; the selected mode
/// gives the centroid and the bounding box. Empty sets are failures.
EpochMetrics epochMetrics(const PositionSet& set, const Vec2& truth, const StreetFrame& frame, int epoch);

EpochResult runEstimator(const Scenario& sc, std::size_t epoch, const EpochInputs& in, Estimator est,
                         const RunOptions& opt);
EpochResult runEpoch(const Scenario& sc, std::size_t epoch, Estimator est, const RunOptions& opt);

/// Every epoch for each requested estimator; results[e][k] is estimator e,
/// epoch k. Epochs run in parallel when opt.pipeline.parallel is set.
std::vector<std::vector<EpochResult>> evaluate(const Scenario& sc, std::span<const Estimator> estimators,
                                               const RunOptions& opt);

struct AggregateReport {
  std::size_t epochs = 0;
  std::size_t failed = 0;
  double failureRate = 0.0;
  double modeAccuracy = 0.0;  // over non-failed epochs
  double rmsHorizontal = 0.0;
  double rmsCross = 0.0;
  double rmsAlong = 0.0;
  double rmsCrossBound = 0.0;
  double rmsAlongBound = 0.0;
};

/// RMS over the non-failed epochs. Throws std::runtime_error when every epoch failed.
AggregateReport aggregate(std::span<const EpochMetrics> metrics);

/// One row per epoch followed by a summary row per estimator.
std::string metricsCsv(std::span<const Estimator> estimators, const std::vector<std::vector<EpochMetrics>>& perEstimator);

/// Markdown table of RMS values per estimator plus an Improvement row
/// (percent reduction of the second estimator relative to the first).
std::string comparisonTable(std::span<const Estimator> estimators, std::span<const AggregateReport> reports);

}  // namespace urbangnss
