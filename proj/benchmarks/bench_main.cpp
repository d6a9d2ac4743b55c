// Microbenchmarks for the hot paths: arbiter decisions, allocator cycles,
// and whole-mesh steps under load.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "nocsim/allocators.hpp"
#include "nocsim/arbiter.hpp"
#include "nocsim/mesh.hpp"
#include "nocsim/traffic.hpp"
#include "nocsim/vc_control.hpp"

using namespace nocsim;

namespace {

std::vector<std::uint64_t> random_requests(int width, std::size_t n) {
  std::mt19937_64 rng(42);
  const std::uint64_t mask = width == 64 ? ~0ull : ((1ull << width) - 1);
  std::vector<std::uint64_t> v(n);
  for (std::uint64_t& r : v) r = rng() & mask;
  return v;
}

void BM_ArbiterPeek(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  RoundRobinArbiter arb(width);
  const std::vector<std::uint64_t> reqs = random_requests(width, 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(arb.peek(reqs[i]));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_ArbiterPeek)->Arg(16)->Arg(64);

void BM_ArbiterArbitrate(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  RoundRobinArbiter arb(width);
  const std::vector<std::uint64_t> reqs = random_requests(width, 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(arb.arbitrate(reqs[i]));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_ArbiterArbitrate)->Arg(16)->Arg(64);

void BM_VaCycle(benchmark::State& state) {
  const int rows = 16;
  VaState va(rows);
  std::vector<VcAvailabilityTracer> tracers;
  for (int o = 0; o < kPortCount; ++o) {
    tracers.push_back(VcAvailabilityTracer::id_tracking(rows));
  }
  std::mt19937_64 rng(7);
  std::vector<VaRequest> reqs;
  for (int in = 0; in < kPortCount; ++in) {
    for (int k = 0; k < 3; ++k) {
      reqs.push_back({in, static_cast<int>(rng() % rows),
                      static_cast<int>(rng() % kPortCount)});
    }
  }
  for (auto _ : state) {
    std::vector<VaGrant> grants =
        va_cycle(va, reqs, tracers, nullptr, ControlLayout::Proposed);
    benchmark::DoNotOptimize(grants.data());
    for (const VaGrant& g : grants) tracers[g.out_port].release(g.downstream_vc);
  }
}
BENCHMARK(BM_VaCycle);

void BM_SaCycle(benchmark::State& state) {
  const int rows = 16;
  SaState sa(rows);
  CreditBank credits = CreditBank::pooled(rows);
  std::mt19937_64 rng(7);
  std::vector<SaRequest> reqs;
  for (int in = 0; in < kPortCount; ++in) {
    std::uint64_t used = 0;
    for (int k = 0; k < 3; ++k) {
      const int row = static_cast<int>(rng() % rows);
      if ((used >> row) & 1) continue;
      used |= 1ull << row;
      reqs.push_back({in, row, static_cast<int>(rng() % kPortCount), -1, row});
    }
  }
  for (auto _ : state) {
    std::vector<SaGrant> grants =
        sa_cycle(sa, reqs, credits, nullptr, ControlLayout::Proposed);
    benchmark::DoNotOptimize(grants.data());
    for (const SaGrant& g : grants) credits.release(g.out_port, g.downstream_vc);
  }
}
BENCHMARK(BM_SaCycle);

void BM_MeshStep(benchmark::State& state) {
  const double rate = static_cast<double>(state.range(0)) / 100.0;
  MeshParams mp;  // 4x4, 16-slot dynamic buffers
  Mesh mesh(mp);
  Injector inj(TrafficPattern{}, rate, 4, 128, 3, mp.width, mp.height);
  for (auto _ : state) {
    for (int y = 0; y < mp.height; ++y) {
      for (int x = 0; x < mp.width; ++x) {
        if (auto p = inj.maybe_inject({x, y}, mesh.now())) mesh.inject(*p);
      }
    }
    mesh.step();
  }
  state.counters["flits/s"] = benchmark::Counter(
      static_cast<double>(mesh.delivered_flits()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_MeshStep)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
