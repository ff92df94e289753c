#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbangnss/citymodel.hpp"
#include "urbangnss/reception.hpp"
#include "urbangnss/reflection.hpp"
#include "urbangnss/region2d.hpp"
#include "urbangnss/shadow.hpp"

namespace urbangnss {

/// Shadow and reflection regions of one satellite over an AOI.
struct SatelliteRegions {
  std::string satelliteId;
  Region2D shadow;
  Region2D reflection;  // empty when reflections were not requested
};

/// Runs the shadow pipeline and, when `withReflections`, hands its volumes to
/// the reflection pipeline so they are built only once.
SatelliteRegions computeSatelliteRegions(const CityModel& city, const AOI& aoi, const SatelliteState& s,
                                         bool withReflections, const PipelineOptions& opt = {});

/// computeSatelliteRegions for every satellite. With opt.parallel the
/// satellites are spread over threads; the result order follows `sats`.
std::vector<SatelliteRegions> computeAllRegions(const CityModel& city, const AOI& aoi,
                                                std::span<const SatelliteState> sats, bool withReflections,
                                                const PipelineOptions& opt = {});

struct PositionSet {
  Region2D region;
  std::vector<Region2D> modeList;
  std::optional<std::size_t> selectedMode;
  std::optional<Vec2> pointEstimate;

  bool failed() const { return region.empty(); }
};

/// Wraps a final region: extracts modes and sets the point estimate to the
/// region centroid (no mode selected yet).
PositionSet makePositionSet(Region2D region);

/// Marks mode `index` as selected and moves the point estimate to its centroid.
void selectMode(PositionSet& set, std::size_t index);

/// One refinement step. NLOS-only keeps P inside the shadow, LOS+NLOS keeps
/// P inside the reflection region, LOS-only removes both.
Region2D refineStep(const Region2D& p, const Region2D& shadow, const Region2D& reflection, ReceptionCondition c);

/// Shadow matching with binary flags: NLOS keeps the shadow, LOS removes it.
PositionSet zsmEstimate(const Region2D& aoi, std::span<const SatelliteRegions> regions, const std::vector<bool>& los);

/// Shadow plus reflection matching with three-way reception conditions.
PositionSet zsrmEstimate(const Region2D& aoi, std::span<const SatelliteRegions> regions,
                         std::span<const ReceptionCondition> conditions);

/// Convenience overloads that compute the regions first.
PositionSet zsmEstimate(const CityModel& city, const AOI& aoi, std::span<const SatelliteState> sats,
                        const std::vector<bool>& los, const PipelineOptions& opt = {});
PositionSet zsrmEstimate(const CityModel& city, const AOI& aoi, std::span<const SatelliteState> sats,
                         std::span<const ReceptionCondition> conditions, const PipelineOptions& opt = {});

}  // namespace urbangnss
