#include "dtar/harness/evaluate.hpp"

#include <iomanip>
#include <ostream>

#include "json.hpp"

namespace dtar::harness {

std::uint64_t eval_episode_seed(std::uint64_t seed, Scenario s, int ep) {
  return derive_seed(seed, Stream::kEval, (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(ep));
}

EvalRow evaluate_scenario(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg,
                          Scenario scenario, std::uint64_t seed, int episodes, std::ostream* trace) {
  agent.set_training(false);
  EvalRow row;
  row.metrics.agent = agents::to_string(agent.kind());
  row.metrics.scenario = to_string(scenario);
  row.metrics.per_hop_delay_ms = world.per_hop_delay_ms;
  Fnv1a env, tr;
  EpisodeOptions opts;
  opts.trace = trace;
  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeStats st = run_episode(agent, world, cfg, scenario, eval_episode_seed(seed, scenario, ep), opts);
    row.metrics.merge(st.metrics);
    row.faulted_traversals += st.faulted_traversals;
    row.hop_budget_exceeded += st.hop_budget_exceeded;
    row.mask_violations += st.mask_violations;
    env.add(st.env_hash);
    tr.add(st.trace_hash);
  }
  row.env_hash = env.value();
  row.trace_hash = tr.value();
  return row;
}

std::vector<EvalRow> evaluate(const std::vector<AgentUnderTest>& list, const ExperimentConfig& cfg,
                              std::uint64_t seed, int episodes_per_scenario) {
  std::vector<EvalRow> rows;
  for (const auto& a : list) {
    for (Scenario s : kAllScenarios) {
      rows.push_back(evaluate_scenario(*a.agent, *a.world, cfg, s, seed, episodes_per_scenario));
    }
  }
  return rows;
}

void write_results_csv(std::ostream& os, const std::vector<EvalRow>& rows) {
  os << "agent,scenario,episodes,sr,plr,cv_mean,delay_ms_mean,hops_mean\n" << std::setprecision(10);
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << m.agent << ',' << m.scenario << ',' << m.episodes << ',' << m.sr() << ',' << m.plr() << ',' << m.cv_mean()
       << ',' << m.delay_ms_mean() << ',' << m.hops_mean() << '\n';
  }
}

void write_results_json(std::ostream& os, const std::vector<EvalRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    arr.push_back({{"agent", m.agent},
                   {"scenario", m.scenario},
                   {"episodes", m.episodes},
                   {"requests", m.requests},
                   {"sr", m.sr()},
                   {"plr", m.plr()},
                   {"cv_mean", m.cv_mean()},
                   {"delay_ms_mean", m.delay_ms_mean()},
                   {"hops_mean", m.hops_mean()},
                   {"faulted_traversals", r.faulted_traversals},
                   {"env_hash", r.env_hash}});
  }
  os << arr.dump(2) << '\n';
}

}  // namespace dtar::harness
