#pragma once

#include <optional>
#include <span>
#include <vector>

#include "urbangnss/region2d.hpp"
#include "urbangnss/rng.hpp"
#include "urbangnss/shadow.hpp"

namespace urbangnss {

struct SPCConfig {
  int sampleCount = 5000;       // k, offsets drawn from the LOS reference
  int perModeSamples = 200;     // candidate points drawn inside each mode
  double kernelBandwidth = 5.0;  // m
  double dirichletPrior = 1.0;

  void validate() const;
};

/// One satellite as seen by the mode selector.
struct RangeObservation {
  SatelliteState state;
  double pseudorange = 0.0;  // m
  double pLos = 0.0;         // classifier probability that the direct signal is present
};

/// Lowest index whose mode contains `truth` (within tol), nullopt if none.
std::optional<std::size_t> idealSelect(std::span<const Region2D> modes, const Vec2& truth, double tol = tol::geom);

/// Pseudorange-consistency selector. Each mode gets perModeSamples uniform
/// points and, per satellite, a Gaussian kernel density of the range offsets
/// rho - |s - p| at those points. k reference offsets are drawn around zero
/// with satellites picked in proportion to P(LOS); each draw is credited to
/// the mode whose density for that satellite is highest there. Modes are
/// scored by the Dirichlet-multinomial predictive log((n + a) / (k + K a));
/// ties go to the larger mode. With no LOS weight the largest mode wins.
///
/// The result does not depend on the order of `modes`: mode samples are drawn
/// from streams keyed by the mode's own geometry.
std::size_t spcSelect(std::span<const Region2D> modes, std::span<const RangeObservation> obs, const SPCConfig& cfg,
                      std::uint64_t seed);

/// Per-mode scores of the last step, exposed for tests and reports.
std::vector<double> spcScores(std::span<const Region2D> modes, std::span<const RangeObservation> obs,
                              const SPCConfig& cfg, std::uint64_t seed);

/// Uniform points inside a region by rejection from its bounding box.
std::vector<Vec2> samplePoints(const Region2D& r, int count, RandomStream& rng);

}  // namespace urbangnss
