// Serial reference against the OpenMP paths: Gaussian rounding over many
// candidates and the Monte-Carlo harness over (trial, snr) jobs.

#include <benchmark/benchmark.h>

#include "twr/bench.hpp"
#include "twr/fractional.hpp"

using namespace twr;

namespace {

struct RoundingCase {
  MaxMinSpec spec;
  HermitianMatrix X;
};

const RoundingCase& rounding_case() {
  static const RoundingCase c = [] {
    const auto inst = make_symmetric_instance(generate_channels(7, 3, 6), 10.0, 10.0, 1.0);
    RoundingCase r{twr_maxmin_spec(build_forms(inst), inst.sinr_targets, 10.0), {}};
    DinkelbachOptions o;
    o.round = false;
    r.X = dinkelbach_maxmin(r.spec, o).X_opt;
    return r;
  }();
  return c;
}

void BM_rounding(benchmark::State& state) {
  const auto& c = rounding_case();
  RoundingOptions o;
  o.samples = static_cast<int>(state.range(1));
  o.execution = state.range(0) ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) {
    auto r = gaussian_rounding(
        c.X, [&](const CVector& a) { return c.spec.objective(a); }, c.spec.power, o);
    benchmark::DoNotOptimize(r.objective);
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_rounding)->ArgsProduct({{0, 1}, {200, 2000}})->Unit(benchmark::kMillisecond);

void BM_harness(benchmark::State& state) {
  RunConfig c;
  c.mode = RunMode::MaxMin;
  c.pairs = 2;
  c.antennas = 4;
  c.trials = 8;
  c.snr_db = {0.0, 10.0};
  c.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto out = run(c);
    benchmark::DoNotOptimize(out.records.data());
  }
  state.SetLabel(c.parallel ? "parallel" : "serial");
}
BENCHMARK(BM_harness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
