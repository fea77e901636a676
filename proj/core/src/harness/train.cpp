#include "dtar/harness/train.hpp"

#include <deque>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "dtar/agents/dqn.hpp"
#include "dtar/agents/dtar_agent.hpp"
#include "dtar/agents/qrlsn.hpp"
#include "dtar/agents/shortest_path.hpp"
#include "dtar/harness/episode.hpp"

namespace dtar::harness {

using agents::AgentKind;

std::unique_ptr<agents::RoutingAgent> make_agent(AgentKind kind, const ExperimentConfig& cfg, std::uint64_t seed) {
  const int k = cfg.partition.num_domains;
  switch (kind) {
    case AgentKind::kDtar:
    case AgentKind::kDtarMlp:
    case AgentKind::kDtarRandPart:
      return std::make_unique<agents::DtarAgent>(kind, k, cfg.ppo, seed);
    case AgentKind::kDijkstra:
      return std::make_unique<agents::DijkstraAgent>();
    case AgentKind::kElb:
      return std::make_unique<agents::ElbAgent>();
    case AgentKind::kQrlsn:
      return std::make_unique<agents::QrlsnAgent>(k, cfg.qrlsn);
    case AgentKind::kCdparDqn:
      return std::make_unique<agents::CdparAgent>(k, cfg.dqn, seed);
  }
  throw std::invalid_argument("make_agent: unknown kind");
}

World world_for(AgentKind kind, const ExperimentConfig& cfg, const DomainPartition& partition) {
  return World::build(cfg.constellation, kind == AgentKind::kDtarRandPart ? ablation_partition(cfg) : partition);
}

TrainResult train(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg, std::uint64_t seed,
                  const TrainOptions& opts) {
  if (!agents::is_learned(agent.kind())) {
    throw std::invalid_argument(agents::to_string(agent.kind()) + " has nothing to train");
  }
  const TrainConfig& tc = cfg.train;
  TrainResult res;
  agent.set_training(true);
  Rng scenario_rng = make_rng(seed, Stream::kScenario);

  std::deque<double> window;
  double window_sum = 0.0;
  long long next_log = tc.log_interval;
  long long next_ckpt = tc.checkpoint_interval;

  EpisodeOptions eo;
  eo.timestep_budget = tc.total_timesteps;
  eo.on_flow = [&](double reward, long long steps) {
    window.push_back(reward);
    window_sum += reward;
    if (static_cast<int>(window.size()) > tc.reward_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    while (steps >= next_log) {
      // Recompute the sum now and then so rounding does not drift.
      window_sum = std::accumulate(window.begin(), window.end(), 0.0);
      RewardPoint p{next_log, window_sum / static_cast<double>(window.size())};
      res.curve.push_back(p);
      if (opts.on_log) opts.on_log(p);
      next_log += tc.log_interval;
    }
    while (steps >= next_ckpt) {
      if (!opts.checkpoint_path.empty()) agent.save(opts.checkpoint_path);
      next_ckpt += tc.checkpoint_interval;
    }
  };

  while (agent.timesteps() < tc.total_timesteps) {
    const Scenario sc = sample_scenario(cfg.episode, scenario_rng);
    const std::uint64_t base = derive_seed(seed, Stream::kScenario, static_cast<std::uint64_t>(res.episodes) + 1);
    const long long before = agent.timesteps();
    run_episode(agent, world, cfg, sc, base, eo);
    ++res.episodes;
    if (agent.timesteps() == before) {
      throw std::runtime_error("training made no progress: no routing decisions in an episode");
    }
  }
  res.timesteps = agent.timesteps();
  agent.set_training(false);
  if (!opts.checkpoint_path.empty()) agent.save(opts.checkpoint_path);
  return res;
}

void write_reward_curve_csv(std::ostream& os, const std::vector<RewardPoint>& curve) {
  os << "step,episode_reward_mean_100\n" << std::setprecision(10);
  for (const auto& p : curve) os << p.step << ',' << p.mean_reward << '\n';
}

}  // namespace dtar::harness
