// Microbenchmarks for the paths that dominate sweep time: the closed-form
// two-level layer, the control-ODE synthesis stage, and the four-level
// verification integrator.
#include <benchmark/benchmark.h>

#include "ptforge/ptcore.hpp"
#include "ptforge/quadsim.hpp"
#include "ptforge/synth.hpp"

using namespace ptforge;

namespace {

synth::ControlParams recycled_point(double horizon) {
  synth::ControlParams p;
  p.pt = pt::params_from_ratio(0.5);
  p.omega_init = 0.05 * p.pt.lambda;
  p.omega03 = 0.05 * p.pt.lambda;  // above threshold: any horizon is reachable
  p.horizon = horizon;
  return p;
}

void BM_TwoLevelPropagator(benchmark::State& state) {
  const auto p = pt::params_from_ratio(0.5);
  double tau = 0.0;
  for (auto _ : state) {
    tau += 0.37;
    benchmark::DoNotOptimize(pt::propagator(p, tau));
  }
}
BENCHMARK(BM_TwoLevelPropagator);

void BM_TwoLevelObservables(benchmark::State& state) {
  const auto p = pt::params_from_ratio(0.5);
  double tau = 0.0;
  for (auto _ : state) {
    tau += 0.37;
    benchmark::DoNotOptimize(pt::observables(pt::evolve(p, pt::kPi / 2, tau)));
  }
}
BENCHMARK(BM_TwoLevelObservables);

void BM_ControlCoefficients(benchmark::State& state) {
  const auto p = recycled_point(400 * pt::kPi);
  double tau = 0.0;
  for (auto _ : state) {
    tau += 0.0037;  // stay clear of the amplitude-vanishing instants
    benchmark::DoNotOptimize(synth::control_coefficients(p, tau));
  }
}
BENCHMARK(BM_ControlCoefficients);

// Synthesis cost over 1, 4, and 16 base periods.
void BM_ControlSynthesis(benchmark::State& state) {
  const auto p = recycled_point(state.range(0) * 2 * pt::kPi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth::integrate_controls(p));
  }
}
BENCHMARK(BM_ControlSynthesis)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

// One grid point of a breakdown scan: locate the divergence of an
// un-recycled run (tau* ~ 32 for these parameters).
void BM_BreakdownLocation(benchmark::State& state) {
  auto p = recycled_point(400 * pt::kPi);
  p.omega03 = 0.0;
  p.omega_init = 0.1 * p.pt.lambda;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth::breakdown_time(p));
  }
}
BENCHMARK(BM_BreakdownLocation)->Unit(benchmark::kMillisecond);

// Independent four-level verification of a pre-built schedule.
void BM_FourLevelVerification(benchmark::State& state) {
  const auto trace = synth::integrate_controls(
      recycled_point(state.range(0) * 2 * pt::kPi));
  const quad::Schedule sched(trace);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quad::evolve_four_level(sched, sched.tau_end()));
  }
}
BENCHMARK(BM_FourLevelVerification)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
