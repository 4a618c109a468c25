#include <benchmark/benchmark.h>

#include "arvaes/sim.hpp"

using namespace arvaes;

namespace {

void BM_FieldIntensity(benchmark::State& state) {
  const DipoleAlignment align = m_matrix(rpy_to_rot(0.1, 0.2, 0.3));
  Vec3 p(12.0, -7.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(field_intensity(p, align));
  }
}
BENCHMARK(BM_FieldIntensity);

void BM_DipoleField(benchmark::State& state) {
  const Mat3 r = rpy_to_rot(0.1, 0.2, 0.3);
  Vec3 p(12.0, -7.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dipole_field(p, r));
  }
}
BENCHMARK(BM_DipoleField);

void BM_Rk4Step(benchmark::State& state) {
  VehicleParams params;
  QuadState s;
  s.w_body = Vec3(0.1, -0.05, 0.2);
  const Vec3 tau(0.01, 0.02, -0.01);
  for (auto _ : state) {
    s = integrate_rk4(s, params.hover_thrust(), tau, params, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Rk4Step);

void BM_ControlStep(benchmark::State& state) {
  VehicleParams params;
  const RegulatorGains gains = synthesize_gains(params, 0.65, 1.0 / 250.0);
  RegulatorState reg;
  QuadState s;
  s.p = Vec3(0.5, -0.3, -6.0);
  const Vec3 ref(0.0, 0.0, -6.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(control_step(s, ref, reg, gains, params));
  }
}
BENCHMARK(BM_ControlStep);

void BM_ShortRun(benchmark::State& state) {
  Scenario s = Scenario::defaults();
  s.duration = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s));
  }
}
BENCHMARK(BM_ShortRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
