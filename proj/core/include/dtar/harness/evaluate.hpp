#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/harness/episode.hpp"

namespace dtar::harness {

struct EvalRow {
  MetricsRecord metrics;
  std::uint64_t env_hash = 0;    // combined over episodes
  std::uint64_t trace_hash = 0;  // combined over episodes
  long long faulted_traversals = 0;
  long long hop_budget_exceeded = 0;
  long long mask_violations = 0;
};

/// Base seed of evaluation episode ep in scenario s; shared by all agents.
std::uint64_t eval_episode_seed(std::uint64_t seed, Scenario s, int ep);

/// Greedy episodes of one agent in one scenario.
EvalRow evaluate_scenario(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg,
                          Scenario scenario, std::uint64_t seed, int episodes, std::ostream* trace = nullptr);

struct AgentUnderTest {
  agents::RoutingAgent* agent = nullptr;
  const World* world = nullptr;
};

/// One row per agent and scenario, agents in the given order.
std::vector<EvalRow> evaluate(const std::vector<AgentUnderTest>& agents, const ExperimentConfig& cfg,
                              std::uint64_t seed, int episodes_per_scenario);

/// agent,scenario,episodes,sr,plr,cv_mean,delay_ms_mean,hops_mean
void write_results_csv(std::ostream& os, const std::vector<EvalRow>& rows);
void write_results_json(std::ostream& os, const std::vector<EvalRow>& rows);

}  // namespace dtar::harness
