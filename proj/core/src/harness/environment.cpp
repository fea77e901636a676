#include "dtar/harness/environment.hpp"

#include <algorithm>
#include <stdexcept>

#include "dtar/domain_state.hpp"

namespace dtar::harness {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kNormal:
      return "normal";
    case Scenario::kSurge:
      return "surge";
    case Scenario::kFault:
      return "fault";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  for (Scenario s : kAllScenarios)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

Scenario sample_scenario(const EpisodeConfig& cfg, Rng& rng) {
  const double u = uniform01(rng);
  if (u < cfg.weight_normal) return Scenario::kNormal;
  if (u < cfg.weight_normal + cfg.weight_surge) return Scenario::kSurge;
  return cfg.weight_fault > 0.0 ? Scenario::kFault : (cfg.weight_surge > 0.0 ? Scenario::kSurge : Scenario::kNormal);
}

World World::build(const ConstellationConfig& ccfg, const DomainPartition& part) {
  World w;
  w.constellation = ccfg;
  w.sats = build_walker(ccfg);
  if (static_cast<int>(part.labels().size()) != w.sats.size()) {
    throw std::invalid_argument("partition size does not match the constellation");
  }
  w.partition = part;
  w.dg = build_domain_graph(part, w.sats);
  for (const auto& e : w.dg.edges()) w.domain_edges.emplace_back(e.a, e.b);
  w.per_hop_delay_ms = dtar::per_hop_delay_ms(ccfg);
  return w;
}

TrafficMatrix partition_traffic(const ExperimentConfig& cfg, const SatGraph& g, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kPartitioner, 0xFFFFFFFFull);
  return daily_average_traffic(cfg.traffic, g, cfg.constellation, cfg.partition.traffic_steps, rng);
}

Nsga2Result compute_partition(const ExperimentConfig& cfg, std::uint64_t seed) {
  const SatGraph g = build_walker(cfg.constellation);
  const TrafficMatrix t = partition_traffic(cfg, g, seed);
  return run_nsga2(g, t, cfg.partition.num_domains, cfg.partition.nsga2, seed);
}

DomainPartition ablation_partition(const ExperimentConfig& cfg) {
  return uniform_partition(cfg.constellation.num_sats(), cfg.partition.num_domains);
}

std::vector<FlowRequest> sample_flows(const TrafficMatrix& t, const DomainPartition& part, int count, Rng& rng) {
  const int n = t.size();
  const auto& labels = part.labels();
  std::vector<double> cumulative;
  std::vector<int> cells;
  double acc = 0.0;
  double positive_sum = 0.0;
  int positive_count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = t(i, j);
      if (v > 0.0) {
        positive_sum += v;
        ++positive_count;
      }
      if (v > 0.0 && labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) {
        acc += v;
        cumulative.push_back(acc);
        cells.push_back(i * n + j);
      }
    }
  }
  if (cells.empty()) throw std::runtime_error("sample_flows: no cross-domain traffic");
  const double mean_positive = positive_sum / positive_count;
  std::vector<FlowRequest> flows;
  flows.reserve(static_cast<std::size_t>(count));
  for (int f = 0; f < count; ++f) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    const int cell = cells[static_cast<std::size_t>(it - cumulative.begin())];
    FlowRequest r;
    r.src_sat = cell / n;
    r.dst_sat = cell % n;
    r.src_domain = labels[static_cast<std::size_t>(r.src_sat)];
    r.dst_domain = labels[static_cast<std::size_t>(r.dst_sat)];
    r.demand = t(r.src_sat, r.dst_sat) / mean_positive;
    flows.push_back(r);
  }
  return flows;
}

agents::GraphSnapshot make_snapshot(const World& world, const FaultState& faults, const LinkLoadState& loads,
                                    const SurgeHotspot* hotspot, const TrafficMatrix& t, std::uint64_t id) {
  agents::GraphSnapshot s;
  s.id = id;
  s.node_features = node_features(world.dg, faults, hotspot, t, world.partition);
  s.graph = nn::build_graph(world.dg.num_domains(), world.domain_edges, edge_features(world.dg, loads, faults));
  return s;
}

}  // namespace dtar::harness
