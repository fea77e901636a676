#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/constellation.hpp"
#include "dtar/domain_graph.hpp"
#include "dtar/harness/config.hpp"
#include "dtar/partition.hpp"
#include "dtar/partitioner.hpp"
#include "dtar/traffic.hpp"

namespace dtar::harness {

enum class Scenario { kNormal, kSurge, kFault };

std::string to_string(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);
inline constexpr Scenario kAllScenarios[] = {Scenario::kNormal, Scenario::kSurge, Scenario::kFault};

/// Draws a scenario from the configured mix.
Scenario sample_scenario(const EpisodeConfig& cfg, Rng& rng);

/// Static simulation context: constellation, partition and domain graph.
struct World {
  ConstellationConfig constellation;
  SatGraph sats;
  DomainPartition partition;
  DomainGraph dg;
  std::vector<std::pair<int, int>> domain_edges;  // (a, b) in edge-id order
  double per_hop_delay_ms = 0.0;

  static World build(const ConstellationConfig& ccfg, const DomainPartition& part);
};

/// Traffic matrix the partitioner optimises: the mean over the configured
/// number of steps.
TrafficMatrix partition_traffic(const ExperimentConfig& cfg, const SatGraph& g, std::uint64_t seed);

/// NSGA-II partition for the configuration and seed.
Nsga2Result compute_partition(const ExperimentConfig& cfg, std::uint64_t seed);

/// Plane-major uniform partition used by DTAR_RANDPART.
DomainPartition ablation_partition(const ExperimentConfig& cfg);

struct FlowRequest {
  int src_sat = 0;
  int dst_sat = 0;
  int src_domain = 0;
  int dst_domain = 0;
  double demand = 0.0;
};

/// Draws (i, j) with probability proportional to T_ij among pairs in
/// different domains. Demand is T_ij over the mean positive entry of T.
/// Throws std::runtime_error when no cross-domain mass exists.
std::vector<FlowRequest> sample_flows(const TrafficMatrix& t, const DomainPartition& part, int count, Rng& rng);

/// Encoder inputs for the current step.
agents::GraphSnapshot make_snapshot(const World& world, const FaultState& faults, const LinkLoadState& loads,
                                    const SurgeHotspot* hotspot, const TrafficMatrix& t, std::uint64_t id);

}  // namespace dtar::harness
