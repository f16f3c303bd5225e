#include "stirap/geometry.hpp"
#include "stirap/integrator.hpp"
#include "stirap/noise.hpp"
#include "stirap/protocol.hpp"
#include "stirap/pulse.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_PropagateLoop(benchmark::State& state) {
  const stirap::PulseSchedule loop = stirap::tangerine(stirap::LoopSpec{});
  const stirap::ProtocolSchedule protocol = stirap::repeated_loops(loop, 1, stirap::LoopSign::Positive);
  const stirap::LambdaParams params;
  stirap::PropagationOptions options;
  options.substeps = static_cast<int>(state.range(0));
  options.keep_states = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stirap::propagate(stirap::DensityMatrix::basis(stirap::Level::Minus), protocol, params, options));
  }
}
BENCHMARK(BM_PropagateLoop)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BerryIntegral(benchmark::State& state) {
  const stirap::PulseSchedule loop = stirap::tangerine(stirap::LoopSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(stirap::berry_integral(loop));
}
BENCHMARK(BM_BerryIntegral)->Unit(benchmark::kMicrosecond);

void BM_OuGenerate(benchmark::State& state) {
  const auto samples = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(stirap::ou_generate(8.0, 3.0, 0.3, samples, seed++));
}
BENCHMARK(BM_OuGenerate)->Arg(4097)->Arg(1 << 16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
