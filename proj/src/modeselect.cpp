#include "urbangnss/modeselect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace urbangnss {

void SPCConfig::validate() const {
  if (sampleCount <= 0 || perModeSamples <= 0 || !(kernelBandwidth > 0) || !(dirichletPrior > 0)) {
    throw std::invalid_argument("SPCConfig: all parameters must be positive");
  }
}

std::optional<std::size_t> idealSelect(std::span<const Region2D> modes, const Vec2& truth, double tol) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (contains(modes[i], truth, tol)) return i;
  }
  return std::nullopt;
}

std::vector<Vec2> samplePoints(const Region2D& r, int count, RandomStream& rng) {
  if (r.empty()) throw std::invalid_argument("samplePoints: empty region");
  Vec2 lo = r.polygons()[0].outer[0], hi = lo;
  for (const auto& poly : r.polygons()) {
    for (const auto& v : poly.outer) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(count));
  const long maxTries = 10000L * count;
  for (long t = 0; t < maxTries && static_cast<int>(out.size()) < count; ++t) {
    const Vec2 p(lo.x() + uniform01(rng) * (hi.x() - lo.x()), lo.y() + uniform01(rng) * (hi.y() - lo.y()));
    if (contains(r, p)) out.push_back(p);
  }
  // Slivers that rejection cannot hit fall back to the centroid.
  while (static_cast<int>(out.size()) < count) out.push_back(centroid(r));
  return out;
}

namespace {

// FNV-1a over the quantized vertex coordinates: the same mode gets the same
// stream whatever its position in the list.
std::uint64_t geometryKey(const Region2D& r) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double v) {
    const auto q = static_cast<std::int64_t>(std::llround(v * 1e6));
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(q >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& poly : r.polygons()) {
    for (const auto& v : poly.outer) {
      mix(v.x());
      mix(v.y());
    }
    for (const auto& hole : poly.holes) {
      for (const auto& v : hole) {
        mix(v.x());
        mix(v.y());
      }
    }
  }
  return h;
}

// Strict order used for every tie: larger area first, then lexicographic
// first vertex.
bool preferred(const Region2D& a, const Region2D& b) {
  const double aa = a.area(), ab = b.area();
  if (aa != ab) return aa > ab;
  const Vec2& va = a.polygons()[0].outer[0];
  const Vec2& vb = b.polygons()[0].outer[0];
  if (va.x() != vb.x()) return va.x() < vb.x();
  return va.y() < vb.y();
}

// rank[i] is mode i's position in the tie-break order.
std::vector<std::size_t> tieRanks(std::span<const Region2D> modes) {
  std::vector<std::size_t> order(modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return preferred(modes[a], modes[b]); });
  std::vector<std::size_t> rank(modes.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::size_t bestBy(const std::vector<std::size_t>& rank, const std::vector<double>& value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < value.size(); ++i) {
    if (value[i] > value[best] || (value[i] == value[best] && rank[i] < rank[best])) best = i;
  }
  return best;
}

std::size_t largestMode(std::span<const Region2D> modes) {
  std::vector<double> area(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) area[i] = modes[i].area();
  return bestBy(tieRanks(modes), area);
}

}  // namespace

std::vector<double> spcScores(std::span<const Region2D> modes, std::span<const RangeObservation> obs,
                              const SPCConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (modes.empty()) throw std::invalid_argument("spcSelect: no modes");
  const std::size_t K = modes.size(), J = obs.size();
  const auto M = static_cast<std::size_t>(cfg.perModeSamples);

  // offsets[i][j][n] = rho_j - |s_j - p_n| for the n-th sample of mode i.
  std::vector<std::vector<std::vector<double>>> offsets(K, std::vector<std::vector<double>>(J));
  for (std::size_t i = 0; i < K; ++i) {
    auto rng = makeStream(seed, {0x5053ULL, geometryKey(modes[i])});
    const auto pts = samplePoints(modes[i], cfg.perModeSamples, rng);
    for (std::size_t j = 0; j < J; ++j) {
      auto& o = offsets[i][j];
      o.reserve(M);
      for (const auto& p : pts) o.push_back(obs[j].pseudorange - (obs[j].state.position - Vec3(p.x(), p.y(), 0)).norm());
    }
  }

  std::vector<double> weight(J);
  for (std::size_t j = 0; j < J; ++j) weight[j] = std::max(0.0, obs[j].pLos);
  const double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<double> counts(K, 0.0);
  if (wsum > 0) {
    const double h = cfg.kernelBandwidth;
    auto density = [&](std::size_t i, std::size_t j, double x) {
      double d = 0.0;
      for (double o : offsets[i][j]) {
        const double z = (x - o) / h;
        d += std::exp(-0.5 * z * z);
      }
      return d;
    };
    auto rng = makeStream(seed, {0x4b44ULL});
    const auto rank = tieRanks(modes);
    std::vector<double> dens(K);
    for (int draw = 0; draw < cfg.sampleCount; ++draw) {
      const double u = uniform01(rng) * wsum;
      std::size_t j = 0;
      double acc = weight[0];
      while (acc <= u && j + 1 < J) acc += weight[++j];
      const double x = h * normal01(rng);
      for (std::size_t i = 0; i < K; ++i) dens[i] = density(i, j, x);
      const std::size_t best = bestBy(rank, dens);
      if (dens[best] > 0) counts[best] += 1.0;
    }
  }

  std::vector<double> score(K);
  const double denom = cfg.sampleCount + static_cast<double>(K) * cfg.dirichletPrior;
  for (std::size_t i = 0; i < K; ++i) score[i] = std::log((counts[i] + cfg.dirichletPrior) / denom);
  return score;
}

std::size_t spcSelect(std::span<const Region2D> modes, std::span<const RangeObservation> obs, const SPCConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  if (modes.empty()) throw std::invalid_argument("spcSelect: no modes");
  if (modes.size() == 1) return 0;
  double wsum = 0.0;
  for (const auto& o : obs) wsum += std::max(0.0, o.pLos);
  if (obs.empty() || !(wsum > 0)) return largestMode(modes);
  return bestBy(tieRanks(modes), spcScores(modes, obs, cfg, seed));
}

}  // namespace urbangnss
