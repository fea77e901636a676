#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dtar/agents/dqn.hpp"
#include "dtar/agents/ppo.hpp"
#include "dtar/agents/qrlsn.hpp"
#include "dtar/agents/reward.hpp"
#include "dtar/constellation.hpp"
#include "dtar/faults.hpp"
#include "dtar/partitioner.hpp"
#include "dtar/traffic.hpp"

namespace dtar::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeConfig {
  int steps_per_episode = 144;
  int flows_per_step = 3;
  int h_max = 9;
  double load_rho = 0.9;  // EWMA decay of inter-domain link loads
  double weight_normal = 1.0 / 3.0;
  double weight_surge = 1.0 / 3.0;
  double weight_fault = 1.0 / 3.0;

  void validate() const;
};

struct TrainConfig {
  long long total_timesteps = 200000;
  long long checkpoint_interval = 100000;
  long long log_interval = 1000;
  int reward_window = 100;  // flows in the moving average

  void validate() const;
};

struct EvalConfig {
  int episodes_per_scenario = 100;
  void validate() const;
};

struct PartitionConfig {
  int num_domains = 6;
  /// Steps averaged into the traffic matrix the partitioner optimises.
  int traffic_steps = 144;
  Nsga2Config nsga2;
};

struct ExperimentConfig {
  std::string profile = "desk";
  ConstellationConfig constellation;
  TrafficConfig traffic = TrafficConfig::defaults();
  FaultConfig faults;
  PartitionConfig partition;
  EpisodeConfig episode;
  agents::RewardConfig reward;
  agents::PpoConfig ppo;
  agents::QrlsnConfig qrlsn;
  agents::DqnConfig dqn;
  TrainConfig train;
  EvalConfig eval;

  /// N = 48 (6 x 8), K = 6, 2e5 timesteps.
  static ExperimentConfig desk();
  /// N = 288 (12 x 24), K = 18, 2.5e6 timesteps.
  static ExperimentConfig full();

  /// Epsilon schedules follow the training budget: QRLSN anneals over all
  /// of it, the DQN over the first tenth.
  void derive_schedules();
  void validate() const;
};

/// Parses JSON text. An optional "profile" key selects the base profile;
/// every other key overrides a field. Unknown keys raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace dtar::harness
