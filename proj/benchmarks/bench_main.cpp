#include <benchmark/benchmark.h>

#include "tba/beacon.hpp"
#include "tba/chunk.hpp"
#include "tba/digest.hpp"
#include "tba/simnet.hpp"

namespace {

tba::Bytes sample_bytes(std::size_t n) {
  tba::TrgSource trg = tba::TrgSource::seeded({{1}});
  tba::Bytes out;
  while (out.size() < n) {
    tba::Bytes block = trg.next();
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(n);
  return out;
}

void BM_Digest(benchmark::State& state) {
  tba::Bytes data = sample_bytes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tba::digest(data));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Digest)->Arg(64)->Arg(4096)->Arg(1 << 20);

void BM_ChainExtend(benchmark::State& state) {
  tba::Bytes chunk = sample_bytes(4096);
  tba::ChainHead head{0, tba::digest(chunk)};
  for (auto _ : state) {
    head = tba::chain_extend(head, chunk);
    benchmark::DoNotOptimize(head);
  }
}
BENCHMARK(BM_ChainExtend);

void BM_BeaconStep(benchmark::State& state) {
  tba::Beacon beacon({{2}}, 3, tba::TrgSource::seeded({{3}}));
  tba::Timestamp t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beacon.step(++t));
  }
}
BENCHMARK(BM_BeaconStep);

void BM_Scenario(benchmark::State& state) {
  tba::ScenarioConfig cfg;
  cfg.chunk_count = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tba::run_scenario(cfg));
  }
}
BENCHMARK(BM_Scenario)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
