#include <benchmark/benchmark.h>

#include "asimm/centering.hpp"
#include "asimm/clustering.hpp"
#include "asimm/driver.hpp"
#include "asimm/event_data.hpp"
#include "asimm/metrics.hpp"
#include "asimm/simgen.hpp"

namespace {

const auto& scenario_fixture() {
  static auto fixture = asimm::scenario2(40, 4, 0.3, 0.5, 12345);
  return fixture;
}

void BM_EmpiricalFourier(benchmark::State& state) {
  const auto& [dataset, truth] = scenario_fixture();
  const asimm::EventTimes& ev = dataset.at(0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::empirical_fourier(ev, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_EmpiricalFourier)->Arg(5)->Arg(10)->Arg(20);

void BM_BuildSpectral(benchmark::State& state) {
  const auto& [dataset, truth] = scenario_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::build_spectral(dataset, 10, asimm::WeightMode::Count));
  }
}
BENCHMARK(BM_BuildSpectral);

void BM_CenteringStep(benchmark::State& state) {
  const auto& [dataset, truth] = scenario_fixture();
  auto data = asimm::build_spectral(dataset, 10, asimm::WeightMode::Count);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::centering_step(data, truth.z, truth.v, truth.K,
                                                   static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_CenteringStep)->Arg(1)->Arg(2);

void BM_OptimizeShifts(benchmark::State& state) {
  const auto& [dataset, truth] = scenario_fixture();
  auto data = asimm::build_spectral(dataset, 10, asimm::WeightMode::Count);
  auto centered = asimm::centering_step(data, truth.z, truth.v, truth.K);
  asimm::SubjectProblem problem{&data, 0, centered.a_prime[0],
                                std::span<const asimm::SpectralCurve>(centered.phi.data(), 2)};
  std::vector<double> start = {0.01, 0.02};
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::optimize_shifts(problem, start));
  }
}
BENCHMARK(BM_OptimizeShifts);

void BM_FitScenario1(benchmark::State& state) {
  auto [dataset, truth] = asimm::scenario1(20, static_cast<int>(state.range(0)), 0.3, 777);
  asimm::FitConfig cfg;
  cfg.K = 1;
  cfg.seed = 777;
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::fit(dataset, cfg));
  }
}
BENCHMARK(BM_FitScenario1)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ShiftAlignedDistance(benchmark::State& state) {
  const auto& [dataset, truth] = scenario_fixture();
  auto data = asimm::build_spectral(dataset, 10, asimm::WeightMode::Count);
  auto centered = asimm::centering_step(data, truth.z, truth.v, truth.K);
  const asimm::IntensityComponent& comp = truth.component(0, 0);
  double lambda = truth.lambda[0];
  auto target = [&](double t) { return comp.evaluate(t) / lambda; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(asimm::shift_aligned_distance(centered.phi[0], target));
  }
}
BENCHMARK(BM_ShiftAlignedDistance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
