// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "urbangnss/kernels.hpp"
#include "urbangnss/positioning.hpp"
#include "urbangnss/simeval.hpp"

using namespace urbangnss;

namespace {

const RandomScene& scene() {
  static const RandomScene s = randomBoxScene(1003);
  return s;
}

const std::vector<Vec2>& grid() {
  static const auto pts = kernels::aoiGridPoints(scene().city.aoi, 1.0);
  return pts;
}

const Region2D& shadowRegion() {
  static const Region2D r = computeShadows(scene().city, scene().city.aoi, scene().satellites[0]).shadowRegion;
  return r;
}

const Scenario& canyon() {
  static const Scenario sc = [] {
    CanyonParams p;
    p.epochs = 4;
    return generateCanyonScenario(p, 17);
  }();
  return sc;
}

void BM_OracleGridSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::oracleGridSerial(scene().city, grid(), scene().satellites[0]));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid().size()));
}

void BM_OracleGridParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::oracleGridParallel(scene().city, grid(), scene().satellites[0]));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid().size()));
}

void BM_MembershipSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::membershipSerial(shadowRegion(), grid()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid().size()));
}

void BM_MembershipParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::membershipParallel(shadowRegion(), grid()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid().size()));
}

void regions(benchmark::State& st, bool parallel) {
  PipelineOptions opt;
  opt.parallel = parallel;
  for (auto _ : st) {
    benchmark::DoNotOptimize(computeAllRegions(scene().city, scene().city.aoi, scene().satellites, true, opt));
  }
}
void BM_RegionsSerial(benchmark::State& st) { regions(st, false); }
void BM_RegionsParallel(benchmark::State& st) { regions(st, true); }

void epochs(benchmark::State& st, bool parallel) {
  RunOptions opt;
  opt.pipeline.parallel = parallel;
  const std::vector<Estimator> both{Estimator::Zsm, Estimator::Zsrm};
  for (auto _ : st) benchmark::DoNotOptimize(evaluate(canyon(), both, opt));
}
void BM_EvaluateSerial(benchmark::State& st) { epochs(st, false); }
void BM_EvaluateParallel(benchmark::State& st) { epochs(st, true); }

}  // namespace

BENCHMARK(BM_OracleGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MembershipSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MembershipParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
