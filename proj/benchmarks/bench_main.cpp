#include <benchmark/benchmark.h>

#include <memory>

#include "dtar/agents/actor_critic.hpp"
#include "dtar/harness/config.hpp"
#include "dtar/harness/environment.hpp"
#include "dtar/partitioner.hpp"
#include "dtar/traffic.hpp"

using namespace dtar;

namespace {

harness::ExperimentConfig desk() { return harness::ExperimentConfig::desk(); }

void BM_GenerateTraffic(benchmark::State& state) {
  auto cfg = desk();
  cfg.constellation.num_planes = static_cast<int>(state.range(0));
  cfg.constellation.sats_per_plane = static_cast<int>(state.range(1));
  const SatGraph g = build_walker(cfg.constellation);
  Rng rng = make_rng(1, 0);
  int t = 0;
  for (auto _ : state) {
    const GroundTrack tracks = ground_track(g, cfg.constellation, t, cfg.traffic.step_seconds);
    benchmark::DoNotOptimize(generate_traffic(cfg.traffic, tracks, t++, rng));
  }
}
BENCHMARK(BM_GenerateTraffic)->Args({6, 8})->Args({12, 24});

void BM_Repair(benchmark::State& state) {
  const auto cfg = desk();
  const SatGraph g = build_walker(cfg.constellation);
  const int k = cfg.partition.num_domains;
  const SizeBounds b = cfg.partition.nsga2.effective_bounds(g.size(), k);
  Rng rng = make_rng(2, 0);
  for (auto _ : state) {
    std::vector<int> labels(static_cast<std::size_t>(g.size()));
    for (auto& l : labels) l = uniform_int(rng, 0, k - 1);
    benchmark::DoNotOptimize(repair(DomainPartition(k, labels), g, b));
  }
}
BENCHMARK(BM_Repair);

void BM_Nsga2Generations(benchmark::State& state) {
  auto cfg = desk();
  cfg.partition.nsga2.generations = static_cast<int>(state.range(0));
  const SatGraph g = build_walker(cfg.constellation);
  const TrafficMatrix t = harness::partition_traffic(cfg, g, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_nsga2(g, t, cfg.partition.num_domains, cfg.partition.nsga2, 1));
  }
}
BENCHMARK(BM_Nsga2Generations)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_EncoderEmbed(benchmark::State& state) {
  const auto cfg = desk();
  const auto world = harness::World::build(cfg.constellation, harness::ablation_partition(cfg));
  Rng rng = make_rng(3, 0);
  const TrafficMatrix t = harness::partition_traffic(cfg, world.sats, 1);
  const auto snap = harness::make_snapshot(world, FaultState::healthy(world.dg), LinkLoadState::zeros(world.dg),
                                           nullptr, t, 1);
  agents::ActorCritic net(world.dg.num_domains(), agents::EncoderKind::kGat, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.embed(snap));
}
BENCHMARK(BM_EncoderEmbed)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
