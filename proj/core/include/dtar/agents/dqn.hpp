#pragma once

#include <deque>
#include <string>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/nn/adam.hpp"
#include "dtar/nn/layers.hpp"

namespace dtar::agents {

struct DqnConfig {
  int replay_capacity = 50000;
  int batch_size = 256;
  int target_sync = 1000;
  int train_freq = 4;
  int learning_starts = 1000;
  double gamma = 0.99;
  double lr = 3e-4;
  double max_grad_norm = 10.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Epsilon reaches epsilon_end after this many steps.
  long long anneal_steps = 20000;

  void validate() const;
};

struct DqnTransition {
  nn::RowVector obs;
  int action = 0;
  double reward = 0.0;
  nn::RowVector next_obs;
  ActionMask next_mask;
  bool done = false;
};

/// r when done, else r + gamma * max over admitted a' of target_q[a'].
double td_target(double reward, bool done, const nn::RowVector& target_q, const ActionMask& next_mask, double gamma);

/// Mean squared TD error over a batch; target values are constants.
nn::Tensor dqn_loss(const nn::Mlp& q, const nn::Mlp& target, const std::vector<const DqnTransition*>& batch,
                    double gamma);

/// DQN over observations stripped of live link state.
class CdparAgent final : public RoutingAgent {
 public:
  CdparAgent(int num_domains, const DqnConfig& cfg, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::kCdparDqn; }
  int act(const DecisionState& s, Rng& rng) override;
  void feedback(const Feedback& fb) override;

  double epsilon() const;
  void sync_target();
  nn::Mlp& q_network() { return q_; }
  nn::Mlp& target_network() { return target_; }
  std::size_t replay_size() const { return replay_.size(); }
  int gradient_steps() const { return gradient_steps_; }

  void save(const std::string& path) const override;
  void load(const std::string& path) override;

 private:
  void train_step();

  DqnConfig cfg_;
  std::uint64_t seed_;
  nn::Mlp q_;
  nn::Mlp target_;
  nn::Adam adam_;
  std::deque<DqnTransition> replay_;
  Rng replay_rng_;
  int gradient_steps_ = 0;
  bool pending_ = false;
  nn::RowVector last_obs_;
  int last_action_ = -1;
};

}  // namespace dtar::agents
