#include <benchmark/benchmark.h>

#include "rwre/boolean_env.hpp"
#include "rwre/renewal_env.hpp"
#include "rwre/renorm.hpp"

namespace rwre {
namespace {

LatticePoint origin() { return LatticePoint{}; }

void BM_BooleanEta(benchmark::State& state) {
  BooleanConfig c;
  c.trunc_s = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eta_s_at(origin(), c, seed++));
}
BENCHMARK(BM_BooleanEta)->Arg(16)->Arg(64);

void BM_BooleanEtaField(benchmark::State& state) {
  BooleanConfig c;
  const BoxSpec box({{-16, 16}, {0, state.range(0) - 1}});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    BooleanEnvironment env(c, seed++);
    benchmark::DoNotOptimize(env.eta_field(box));
  }
}
BENCHMARK(BM_BooleanEtaField)->Arg(16)->Arg(64);

void BM_RenewalColumn(benchmark::State& state) {
  RenewalConfig c;
  c.mu = InterarrivalLaw::parse("uniform 0 6");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RenewalEnvironment env(c, seed++);
    LatticePoint z;
    std::int64_t sum = 0;
    for (z.t = 0; z.t < state.range(0); ++z.t) sum += env.omega(z);
    benchmark::DoNotOptimize(sum);
  }
}
BENCHMARK(BM_RenewalColumn)->Arg(64)->Arg(1024);

void BM_RenewalEta(benchmark::State& state) {
  RenewalConfig c;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RenewalEnvironment env(c, seed++);
    benchmark::DoNotOptimize(env.eta(origin()));
  }
}
BENCHMARK(BM_RenewalEta);

void BM_MinThreats(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0)), H = 4;
  std::vector<LatticePoint> traps;
  for (Coord t = 0; t <= J * H; t += 3) {
    for (Coord x = -J * H; x <= J * H; x += 5) {
      LatticePoint z;
      z.x[0] = x + t % 2;
      z.t = t;
      traps.push_back(z);
    }
  }
  const auto set = TrapSet::explicit_points(1, traps);
  for (auto _ : state) benchmark::DoNotOptimize(min_threats(J, H, set, {origin()}, 1));
}
BENCHMARK(BM_MinThreats)->Arg(4)->Arg(16)->Arg(64);

}  // namespace
}  // namespace rwre

BENCHMARK_MAIN();
