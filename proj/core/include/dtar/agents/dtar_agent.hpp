#pragma once

#include <memory>
#include <string>

#include "dtar/agents/actor_critic.hpp"
#include "dtar/agents/ppo.hpp"

namespace dtar::agents {

/// PPO actor-critic over encoder embeddings. The encoder is trained end to
/// end with the heads. Covers DTAR, DTAR_MLP and DTAR_RANDPART (the latter
/// differs only in the partition the harness gives it).
class DtarAgent final : public RoutingAgent {
 public:
  DtarAgent(AgentKind kind, int num_domains, const PpoConfig& cfg, std::uint64_t seed);

  AgentKind kind() const override { return kind_; }
  int act(const DecisionState& s, Rng& rng) override;
  void feedback(const Feedback& fb) override;

  void save(const std::string& path) const override;
  void load(const std::string& path) override;

  /// Runs an update on whatever the buffer holds, bootstrapping from
  /// last_value when the final transition is not terminal.
  PpoUpdateStats update(double last_value);

  ActorCritic& network() { return net_; }
  const RolloutBuffer& buffer() const { return buffer_; }
  int updates() const { return updates_; }
  const PpoUpdateStats& last_update() const { return last_stats_; }

 private:
  const nn::Matrix& embeddings(const GraphSnapshot& snap);

  AgentKind kind_;
  PpoConfig cfg_;
  std::uint64_t seed_;
  ActorCritic net_;
  nn::Adam adam_;
  RolloutBuffer buffer_;
  int updates_ = 0;
  PpoUpdateStats last_stats_;
  bool pending_ = false;

  std::uint64_t cached_id_ = 0;
  const GraphSnapshot* cached_ptr_ = nullptr;
  int cached_version_ = -1;
  nn::Matrix cached_embeddings_;
};

}  // namespace dtar::agents
