#include <benchmark/benchmark.h>

#include "mhdfem/scenarios.hpp"
#include "mhdfem/selfcheck.hpp"
#include "mhdfem/stepper.hpp"

using namespace mhdfem;

namespace {

SimConfig preset(int which) {
  return which == 0 ? scenario_invariants3d(1) : scenario_rayleigh_taylor(0.4, 8);
}

void BM_Residual(benchmark::State& st) {
  const SimConfig cfg = preset(static_cast<int>(st.range(0)));
  const Problem p = make_problem(cfg);
  StepSystem sys(p.spaces, cfg.physics);
  sys.set_previous(p.state, cfg.time.dt);
  const Vector x = sys.initial_guess();
  Vector r(x.size());
  for (auto _ : st) {
    sys.residual(x, r);
    benchmark::DoNotOptimize(r.data());
  }
  st.counters["unknowns"] = static_cast<double>(x.size());
}
BENCHMARK(BM_Residual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& st) {
  const SimConfig cfg = preset(static_cast<int>(st.range(0)));
  const Problem p = make_problem(cfg);
  StepSystem sys(p.spaces, cfg.physics);
  sys.set_previous(p.state, cfg.time.dt);
  const Vector x = sys.initial_guess();
  for (auto _ : st) benchmark::DoNotOptimize(sys.jacobian(x, cfg.solver.fd_scale).nonZeros());
}
BENCHMARK(BM_Jacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  const SimConfig cfg = preset(static_cast<int>(st.range(0)));
  const Problem p = make_problem(cfg);
  Stepper stepper(p.spaces, cfg.physics, cfg.solver);
  for (auto _ : st) benchmark::DoNotOptimize(stepper.step(p.state, cfg.time.dt).newton_iterations);
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LemmaSuite(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_lemma_suite(1, 10).size());
}
BENCHMARK(BM_LemmaSuite)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
