#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/harness/environment.hpp"

namespace dtar::harness {

/// Agent with freshly initialised parameters for the configuration.
std::unique_ptr<agents::RoutingAgent> make_agent(agents::AgentKind kind, const ExperimentConfig& cfg, std::uint64_t seed);

/// World an agent runs in: the uniform partition for DTAR_RANDPART, the
/// given partitioner output otherwise.
World world_for(agents::AgentKind kind, const ExperimentConfig& cfg, const DomainPartition& partition);

struct RewardPoint {
  long long step = 0;
  double mean_reward = 0.0;  // moving average over the last reward_window flows
};

struct TrainOptions {
  /// Written every checkpoint_interval steps and at the end; empty disables.
  std::string checkpoint_path;
  std::function<void(const RewardPoint&)> on_log;
};

struct TrainResult {
  std::vector<RewardPoint> curve;
  long long timesteps = 0;
  int episodes = 0;
};

/// Runs episodes with i.i.d. scenarios until the agent has taken
/// total_timesteps decisions.
TrainResult train(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg, std::uint64_t seed,
                  const TrainOptions& opts = {});

/// "step,episode_reward_mean_100" rows.
void write_reward_curve_csv(std::ostream& os, const std::vector<RewardPoint>& curve);

}  // namespace dtar::harness
