#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/agents/reward.hpp"
#include "dtar/harness/environment.hpp"

namespace dtar::harness {

enum class FlowOutcome { kArrived, kDeadEnd, kFaultedTraversal, kHopBudget, kNoRoute };

bool succeeded(FlowOutcome o);
std::string to_string(FlowOutcome o);

struct FlowResult {
  FlowOutcome outcome = FlowOutcome::kNoRoute;
  int hops = 0;
  std::vector<int> path;  // domains visited, source first
  double reward = 0.0;    // sum of per-hop rewards
  bool mask_violation = false;
};

/// Routes one flow hop by hop, reporting traversed edges to routed and
/// per-hop rewards to the agent.
FlowResult route_flow(agents::RoutingAgent& agent, const agents::StepView& step, const FlowRequest& flow, int h_max,
                      const agents::RewardConfig& reward, Rng& agent_rng, std::vector<RoutedDemand>* routed);

/// Per-scenario aggregate over one or more episodes.
struct MetricsRecord {
  std::string agent;
  std::string scenario;
  int episodes = 0;
  long long requests = 0;
  long long successes = 0;
  long long success_hops = 0;
  double cv_sum = 0.0;  // sum of per-episode mean CV
  double per_hop_delay_ms = 0.0;

  double sr() const { return requests > 0 ? static_cast<double>(successes) / static_cast<double>(requests) : 0.0; }
  double plr() const { return 1.0 - sr(); }
  double cv_mean() const { return episodes > 0 ? cv_sum / episodes : 0.0; }
  double hops_mean() const {
    return successes > 0 ? static_cast<double>(success_hops) / static_cast<double>(successes) : 0.0;
  }
  double delay_ms_mean() const { return hops_mean() * per_hop_delay_ms; }

  void merge(const MetricsRecord& other);
};

struct EpisodeStats {
  MetricsRecord metrics;
  std::vector<double> flow_rewards;
  long long faulted_traversals = 0;
  long long hop_budget_exceeded = 0;
  long long mask_violations = 0;
  int steps_run = 0;
  std::uint64_t env_hash = 0;    // traffic, hotspot, faults and flow requests
  std::uint64_t trace_hash = 0;  // env_hash inputs plus paths and outcomes
};

struct EpisodeOptions {
  /// Training stops the episode once the agent reaches this many timesteps.
  long long timestep_budget = -1;
  /// Called after each flow with its reward and the agent's timestep count.
  std::function<void(double reward, long long timesteps)> on_flow;
  /// Line-delimited JSON records of faults, flows and paths.
  std::ostream* trace = nullptr;
};

/// Streams derived from base_seed drive traffic, surge, faults and flows,
/// so two agents run with the same base_seed see the same environment.
EpisodeStats run_episode(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg,
                         Scenario scenario, std::uint64_t base_seed, const EpisodeOptions& opts = {});

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n);
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void add(double v);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace dtar::harness
