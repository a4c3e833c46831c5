#include <benchmark/benchmark.h>

#include "binrec/experiments.hpp"

using namespace binrec;

namespace {

// barcode-sized 1D problem at the accurate-recovery resolution
struct BarcodeProblem {
  ModelParams params;
  ExperimentSetup setup;
  FeFunction y_d;
  FeFunction u;

  explicit BarcodeProblem(Potential p) : params(parameter_heuristics(1.0 / 113, p)) {
    params.alpha = 1e-4;
    params.gamma = 0.2;
    params.sigma = 1e-4;
    setup = make_setup(reference_barcode(), params);
    y_d = synthesize_data(setup.u_true, *setup.blur, {params.gamma, 1});
    u = initial_guess(y_d);
  }
};

void BM_BlurApply1D(benchmark::State& state) {
  const auto mesh = build_interval_mesh(static_cast<int>(state.range(0)));
  const BlurOperator blur(mesh, 1e-4);
  const auto u = rasterize(reference_barcode(), mesh);
  for (auto _ : state) benchmark::DoNotOptimize(blur.apply(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BlurApply1D)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

void BM_BlurApply2D(benchmark::State& state) {
  const auto mesh = build_square_mesh(static_cast<int>(state.range(0)));
  const BlurOperator blur(mesh, 0.01);
  const auto u = rasterize(reference_blob(), mesh);
  for (auto _ : state) benchmark::DoNotOptimize(blur.apply(u));
}
BENCHMARK(BM_BlurApply2D)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_WellStep(benchmark::State& state) {
  const BarcodeProblem prob(Potential::SmoothDoubleWell);
  for (auto _ : state) benchmark::DoNotOptimize(dw_step(prob.u, prob.y_d, *prob.setup.blur, prob.params));
}
BENCHMARK(BM_WellStep)->Unit(benchmark::kMillisecond);

void BM_ObstacleStep(benchmark::State& state) {
  const BarcodeProblem prob(Potential::DoubleObstacle);
  for (auto _ : state) benchmark::DoNotOptimize(do_step(prob.u, prob.y_d, *prob.setup.blur, prob.params));
}
BENCHMARK(BM_ObstacleStep)->Unit(benchmark::kMillisecond);

void BM_RoughRecovery(benchmark::State& state) {
  const auto p = state.range(0) == 0 ? Potential::SmoothDoubleWell : Potential::DoubleObstacle;
  const double omega = 1.0 / 113;
  auto m = parameter_heuristics(omega, p);
  m.alpha = 1e-4;
  m.gamma = 0.2;
  m.sigma = 1e-4;
  m.epsilon = omega / (2 * 3.141592653589793);
  m.h = omega / 20;
  m.tol = p == Potential::SmoothDoubleWell ? 1.5e-2 : 4e-2;
  const auto setup = make_setup(reference_barcode(), m);
  for (auto _ : state) benchmark::DoNotOptimize(run_single(setup, m, p, 0));
  state.SetLabel(std::string(to_string(p)));
}
BENCHMARK(BM_RoughRecovery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
