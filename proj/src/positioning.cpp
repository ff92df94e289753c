#include "urbangnss/positioning.hpp"

#include <stdexcept>

namespace urbangnss {

SatelliteRegions computeSatelliteRegions(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                                         bool withReflections, const PipelineOptions& opt) {
  SatelliteRegions out;
  out.satelliteId = s.id;
  const auto shadow = computeShadows(city, aoi, s, opt);
  out.shadow = shadow.shadowRegion;
  if (withReflections) out.reflection = satelliteReflectionRegion(computeReflections(city, aoi, s, shadow, opt));
  return out;
}

std::vector<SatelliteRegions> computeAllRegions(const CityModel& city, const AOI& aoi,
                                                std::span<const SatelliteState> sats, bool withReflections,
                                                const PipelineOptions& opt) {
  std::vector<SatelliteRegions> out(sats.size());
  PipelineOptions inner = opt;
  inner.parallel = false;  // threads go to satellites, not buildings
  const auto n = static_cast<std::ptrdiff_t>(sats.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = computeSatelliteRegions(city, aoi, sats[k], withReflections, inner);
  }
  return out;
}

PositionSet makePositionSet(Region2D region) {
  PositionSet p;
  p.region = std::move(region);
  if (p.region.empty()) return p;
  p.modeList = modes(p.region);
  p.pointEstimate = centroid(p.region);
  return p;
}

void selectMode(PositionSet& set, std::size_t index) {
  if (index >= set.modeList.size()) throw std::out_of_range("selectMode: no such mode");
  set.selectedMode = index;
  set.pointEstimate = centroid(set.modeList[index]);
}

Region2D refineStep(const Region2D& p, const Region2D& shadow, const Region2D& reflection, ReceptionCondition c) {
  switch (c) {
    case ReceptionCondition::NlosOnly:
      return intersection(p, shadow);
    case ReceptionCondition::LosNlos:
      return intersection(p, reflection);
    case ReceptionCondition::LosOnly:
      break;
  }
  const Region2D removed[2] = {shadow, reflection};
  return difference(p, uniteAll(removed));
}

namespace {

// Every refinement is P -> P - X_j for an exclusion set X_j inside the AOI,
// so the final region is AOI - union(X_j): one n-ary union, independent of
// the order the satellites are listed in.
PositionSet excludeAll(const Region2D& aoi, std::vector<Region2D>& exclusions) {
  return makePositionSet(difference(aoi, uniteAll(exclusions)));
}

}  // namespace

PositionSet zsmEstimate(const Region2D& aoi, std::span<const SatelliteRegions> regions, const std::vector<bool>& los) {
  if (regions.size() != los.size()) throw std::invalid_argument("zsmEstimate: one flag per satellite required");
  std::vector<Region2D> ex;
  ex.reserve(regions.size());
  for (std::size_t j = 0; j < regions.size(); ++j) {
    ex.push_back(los[j] ? regions[j].shadow : difference(aoi, regions[j].shadow));
  }
  return excludeAll(aoi, ex);
}

PositionSet zsrmEstimate(const Region2D& aoi, std::span<const SatelliteRegions> regions,
                         std::span<const ReceptionCondition> conditions) {
  if (regions.size() != conditions.size()) {
    throw std::invalid_argument("zsrmEstimate: one condition per satellite required");
  }
  std::vector<Region2D> ex;
  ex.reserve(regions.size());
  for (std::size_t j = 0; j < regions.size(); ++j) {
    switch (conditions[j]) {
      case ReceptionCondition::NlosOnly:
        ex.push_back(difference(aoi, regions[j].shadow));
        break;
      case ReceptionCondition::LosNlos:
        ex.push_back(difference(aoi, regions[j].reflection));
        break;
      case ReceptionCondition::LosOnly:
        ex.push_back(unite(regions[j].shadow, regions[j].reflection));
        break;
    }
  }
  return excludeAll(aoi, ex);
}

PositionSet zsmEstimate(const CityModel& city, const AOI& aoi, std::span<const SatelliteState> sats,
                        const std::vector<bool>& los, const PipelineOptions& opt) {
  const auto regions = computeAllRegions(city, aoi, sats, false, opt);
  return zsmEstimate(aoi.region(), regions, los);
}

PositionSet zsrmEstimate(const CityModel& city, const AOI& aoi, std::span<const SatelliteState> sats,
                         std::span<const ReceptionCondition> conditions, const PipelineOptions& opt) {
  const auto regions = computeAllRegions(city, aoi, sats, true, opt);
  return zsrmEstimate(aoi.region(), regions, conditions);
}

}  // namespace urbangnss
