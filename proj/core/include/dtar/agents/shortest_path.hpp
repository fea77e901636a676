#pragma once

#include <vector>

#include "dtar/agents/agent.hpp"

namespace dtar::agents {

/// Next hop from current toward dst on a hop-count shortest path over every
/// edge (faulted or not). Ties go to the smallest domain id. Returns -1 when
/// dst is unreachable or current == dst.
int hop_next_hop(const DomainGraph& dg, int current, int dst);

/// Weighted variant: distances under per-edge weights, ties (within 1e-12)
/// to the smallest domain id.
std::vector<double> weighted_distances(const DomainGraph& dg, const std::vector<double>& weights, int dst);
int weighted_next_hop(const DomainGraph& dg, const std::vector<double>& weights, int current, int dst);

/// Edge weights 1 + W_e / max(mean W, 1e-9).
std::vector<double> elb_weights(const std::vector<double>& loads);

/// Fault-unaware hop-count routing.
class DijkstraAgent final : public RoutingAgent {
 public:
  AgentKind kind() const override { return AgentKind::kDijkstra; }
  int act(const DecisionState& s, Rng& rng) override;
};

/// Fault-unaware load-weighted routing on a per-episode static snapshot.
/// The episode starts with idle links, so the snapshot is taken from the
/// loads at the end of the first step; hop-count weights apply until then.
class ElbAgent final : public RoutingAgent {
 public:
  AgentKind kind() const override { return AgentKind::kElb; }
  void begin_episode() override;
  void end_step(const StepView& step, const LinkLoadState& after) override;
  int act(const DecisionState& s, Rng& rng) override;

  const std::vector<double>& weights() const { return weights_; }
  void set_snapshot(const std::vector<double>& loads);

 private:
  std::vector<double> weights_;
  bool have_snapshot_ = false;
};

}  // namespace dtar::agents
