#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtar/domain_graph.hpp"
#include "dtar/domain_state.hpp"
#include "dtar/faults.hpp"
#include "dtar/nn/gat.hpp"
#include "dtar/rng.hpp"

namespace dtar::agents {

enum class AgentKind { kDtar, kDtarMlp, kDtarRandPart, kDijkstra, kElb, kQrlsn, kCdparDqn };

std::string to_string(AgentKind kind);
/// Accepts the names produced by to_string, case-insensitively.
std::optional<AgentKind> parse_agent_kind(const std::string& name);
const std::vector<AgentKind>& all_agent_kinds();

bool is_learned(AgentKind kind);
/// Agents whose decisions are restricted by the action mask.
bool is_masked(AgentKind kind);

/// Inputs of the encoder for one simulation step, shared by every decision
/// taken during that step.
struct GraphSnapshot {
  std::uint64_t id = 0;
  nn::Matrix node_features;  // K x 6
  nn::GraphBatch graph;      // directed edges plus self-loops
};

/// Environment state during one simulation step.
struct StepView {
  const DomainGraph* dg = nullptr;
  const FaultState* faults = nullptr;
  const LinkLoadState* loads = nullptr;
  std::shared_ptr<const GraphSnapshot> snapshot;
  int t = 0;
  int steps_per_episode = 1;
  double cv = 0.0;
  bool surge = false;
  bool any_fault = false;
};

/// One routing decision for one flow.
struct DecisionState {
  const StepView* step = nullptr;
  int current = 0;
  int dst = 0;
  int hops_taken = 0;
  int h_max = 0;
  const std::vector<int>* dist_to_dst = nullptr;  // operational hop distances
  ActionMask mask;

  int num_domains() const { return step->dg->num_domains(); }
};

/// Outcome of an action, delivered to learning agents.
struct Feedback {
  double reward = 0.0;
  bool done = false;
  /// Next decision when the flow continues.
  const DecisionState* next = nullptr;
};

class RoutingAgent {
 public:
  virtual ~RoutingAgent() = default;

  virtual AgentKind kind() const = 0;
  bool masked() const { return is_masked(kind()); }

  /// Exploration and learning are active only in training mode.
  virtual void set_training(bool training) { training_ = training; }
  bool training() const { return training_; }

  virtual void begin_episode() {}
  /// Called after the step's flows are routed and loads updated.
  virtual void end_step(const StepView& /*step*/, const LinkLoadState& /*after*/) {}

  /// Next domain; masked agents return an admitted action.
  virtual int act(const DecisionState& s, Rng& rng) = 0;
  /// Reward and continuation for the action returned by the last act().
  virtual void feedback(const Feedback& /*fb*/) {}

  /// Learner steps consumed so far (decisions taken in training mode).
  long long timesteps() const { return timesteps_; }

  virtual void save(const std::string& /*path*/) const {}
  virtual void load(const std::string& /*path*/) {}

 protected:
  bool training_ = false;
  long long timesteps_ = 0;
};

}  // namespace dtar::agents
