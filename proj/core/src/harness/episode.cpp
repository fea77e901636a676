#include "dtar/harness/episode.hpp"

#include <bit>
#include <cstring>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "dtar/domain_state.hpp"
#include "dtar/nn/distributions.hpp"

namespace dtar::harness {

bool succeeded(FlowOutcome o) { return o == FlowOutcome::kArrived; }

std::string to_string(FlowOutcome o) {
  switch (o) {
    case FlowOutcome::kArrived:
      return "arrived";
    case FlowOutcome::kDeadEnd:
      return "dead_end";
    case FlowOutcome::kFaultedTraversal:
      return "faulted_traversal";
    case FlowOutcome::kHopBudget:
      return "hop_budget";
    case FlowOutcome::kNoRoute:
      return "no_route";
  }
  return "unknown";
}

void MetricsRecord::merge(const MetricsRecord& o) {
  episodes += o.episodes;
  requests += o.requests;
  successes += o.successes;
  success_hops += o.success_hops;
  cv_sum += o.cv_sum;
}

void Fnv1a::add_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ull;
  }
}

void Fnv1a::add(double v) { add(std::bit_cast<std::uint64_t>(v)); }

FlowResult route_flow(agents::RoutingAgent& agent, const agents::StepView& step, const FlowRequest& flow, int h_max,
                      const agents::RewardConfig& reward, Rng& agent_rng, std::vector<RoutedDemand>* routed) {
  using agents::StepOutcome;
  const DomainGraph& dg = *step.dg;
  const FaultState& faults = *step.faults;
  const bool masked = agent.masked();
  const std::vector<int> dist = hop_distances(dg, faults, flow.dst_domain);

  FlowResult res;
  res.path.push_back(flow.src_domain);
  agents::DecisionState s;
  s.step = &step;
  s.current = flow.src_domain;
  s.dst = flow.dst_domain;
  s.hops_taken = 0;
  s.h_max = h_max;
  s.dist_to_dst = &dist;
  if (masked) {
    s.mask = action_mask(dg, faults, dist, s.current, 0, h_max);
    if (!any_admitted(s.mask)) {
      res.outcome = FlowOutcome::kDeadEnd;
      res.reward = agents::step_reward(0, 0, 0, StepOutcome::kFailed, reward, false);
      return res;
    }
  }

  while (true) {
    int a;
    try {
      a = agent.act(s, agent_rng);
    } catch (const nn::EmptyMaskError&) {
      res.outcome = FlowOutcome::kDeadEnd;
      return res;
    }
    if (masked && (a < 0 || a >= dg.num_domains() || !s.mask[static_cast<std::size_t>(a)])) {
      res.mask_violation = true;
    }
    const int edge = (a >= 0 && a < dg.num_domains()) ? dg.edge_id(s.current, a) : -1;
    if (edge < 0) {
      res.outcome = FlowOutcome::kNoRoute;
      agent.feedback({-reward.failure, true, nullptr});
      return res;
    }
    if (faults.failed(edge)) {
      res.outcome = FlowOutcome::kFaultedTraversal;
      agent.feedback({-reward.failure - reward.hop_penalty, true, nullptr});
      res.reward += -reward.failure - reward.hop_penalty;
      return res;
    }
    if (routed) routed->push_back({edge, flow.demand});
    ++res.hops;
    res.path.push_back(a);

    const int d_before = dist[static_cast<std::size_t>(s.current)];
    int d_after = dist[static_cast<std::size_t>(a)];
    if (d_before == kUnreachable || d_after == kUnreachable) d_after = d_before;
    const int d0 = d_before == kUnreachable ? 0 : d_before;
    const int d1 = d_before == kUnreachable ? 0 : d_after;

    if (a == flow.dst_domain) {
      const double r = agents::step_reward(d0, d1, res.hops, StepOutcome::kArrived, reward);
      res.reward += r;
      res.outcome = FlowOutcome::kArrived;
      agent.feedback({r, true, nullptr});
      return res;
    }
    if (res.hops >= h_max) {
      const double r = agents::step_reward(d0, d1, res.hops, StepOutcome::kFailed, reward);
      res.reward += r;
      res.outcome = FlowOutcome::kHopBudget;
      agent.feedback({r, true, nullptr});
      return res;
    }
    agents::DecisionState next = s;
    next.current = a;
    next.hops_taken = res.hops;
    if (masked) {
      next.mask = action_mask(dg, faults, dist, a, res.hops, h_max);
      if (!any_admitted(next.mask)) {
        const double r = agents::step_reward(d0, d1, res.hops, StepOutcome::kFailed, reward);
        res.reward += r;
        res.outcome = FlowOutcome::kDeadEnd;
        agent.feedback({r, true, nullptr});
        return res;
      }
    }
    const double r = agents::step_reward(d0, d1, res.hops, StepOutcome::kStep, reward);
    res.reward += r;
    agent.feedback({r, false, &next});
    s = std::move(next);
  }
}

EpisodeStats run_episode(agents::RoutingAgent& agent, const World& world, const ExperimentConfig& cfg,
                         Scenario scenario, std::uint64_t base_seed, const EpisodeOptions& opts) {
  const EpisodeConfig& ec = cfg.episode;
  Rng traffic_rng = make_rng(base_seed, Stream::kTraffic);
  Rng fault_rng = make_rng(base_seed, Stream::kFaults);
  Rng flow_rng = make_rng(base_seed, Stream::kFlows);
  Rng surge_rng = make_rng(base_seed, Stream::kSurge);
  Rng agent_rng = make_rng(base_seed, Stream::kAgent);

  EpisodeStats st;
  st.metrics.agent = agents::to_string(agent.kind());
  st.metrics.scenario = to_string(scenario);
  st.metrics.episodes = 1;
  st.metrics.per_hop_delay_ms = world.per_hop_delay_ms;

  Fnv1a env;
  Fnv1a trace;
  env.add(static_cast<int>(scenario));

  std::optional<SurgeHotspot> hotspot;
  if (scenario == Scenario::kSurge) {
    hotspot = select_hotspot(world.dg, surge_rng);
    env.add(hotspot->edge);
  }
  FaultState faults = FaultState::healthy(world.dg);
  LinkLoadState loads = LinkLoadState::zeros(world.dg);
  agent.begin_episode();

  double cv_total = 0.0;
  bool budget_hit = false;
  for (int t = 0; t < ec.steps_per_episode && !budget_hit; ++t) {
    const GroundTrack tracks = ground_track(world.sats, world.constellation, t, cfg.traffic.step_seconds);
    TrafficMatrix tm = generate_traffic(cfg.traffic, tracks, t, traffic_rng);
    if (hotspot) tm = apply_surge(tm, *hotspot, cfg.traffic.surge_multiplier);
    if (scenario == Scenario::kFault) faults = step_faults(faults, cfg.faults, world.dg, fault_rng);

    env.add(tm.total());
    for (int e = 0; e < faults.num_edges(); ++e) env.add(faults.failed(e) ? 1 : 0);

    agents::StepView view;
    view.dg = &world.dg;
    view.faults = &faults;
    view.loads = &loads;
    view.snapshot = std::make_shared<agents::GraphSnapshot>(make_snapshot(
        world, faults, loads, hotspot ? &*hotspot : nullptr, tm, (base_seed << 16) ^ static_cast<std::uint64_t>(t)));
    view.t = t;
    view.steps_per_episode = ec.steps_per_episode;
    view.cv = cv(loads);
    view.surge = hotspot.has_value();
    view.any_fault = faults.any_failed();

    if (opts.trace) {
      *opts.trace << "{\"t\":" << t << ",\"faults\":[";
      bool first = true;
      for (int e = 0; e < faults.num_edges(); ++e) {
        if (!faults.failed(e)) continue;
        *opts.trace << (first ? "" : ",") << e;
        first = false;
      }
      *opts.trace << "],\"cv\":" << view.cv << "}\n";
    }

    const auto flows = sample_flows(tm, world.partition, ec.flows_per_step, flow_rng);
    std::vector<RoutedDemand> routed;
    for (std::size_t f = 0; f < flows.size(); ++f) {
      const FlowRequest& fr = flows[f];
      env.add(fr.src_sat);
      env.add(fr.dst_sat);
      env.add(fr.demand);
      FlowResult r = route_flow(agent, view, fr, ec.h_max, cfg.reward, agent_rng, &routed);

      ++st.metrics.requests;
      if (succeeded(r.outcome)) {
        ++st.metrics.successes;
        st.metrics.success_hops += r.hops;
      }
      if (r.outcome == FlowOutcome::kFaultedTraversal) ++st.faulted_traversals;
      if (r.hops > ec.h_max) ++st.hop_budget_exceeded;
      if (r.mask_violation) ++st.mask_violations;
      st.flow_rewards.push_back(r.reward);
      trace.add(static_cast<int>(r.outcome));
      for (int d : r.path) trace.add(d);

      if (opts.trace) {
        *opts.trace << "{\"t\":" << t << ",\"flow\":" << f << ",\"src\":" << fr.src_sat << ",\"dst\":" << fr.dst_sat
                    << ",\"src_domain\":" << fr.src_domain << ",\"dst_domain\":" << fr.dst_domain
                    << ",\"demand\":" << fr.demand << ",\"path\":[";
        for (std::size_t i = 0; i < r.path.size(); ++i) *opts.trace << (i ? "," : "") << r.path[i];
        *opts.trace << "],\"outcome\":\"" << to_string(r.outcome) << "\"}\n";
      }
      if (opts.on_flow) opts.on_flow(r.reward, agent.timesteps());
      if (opts.timestep_budget >= 0 && agent.timesteps() >= opts.timestep_budget) {
        budget_hit = true;
        break;
      }
    }
    loads = update_link_loads(loads, routed, ec.load_rho);
    cv_total += cv(loads);
    ++st.steps_run;
    agent.end_step(view, loads);
  }
  st.metrics.cv_sum = st.steps_run > 0 ? cv_total / st.steps_run : 0.0;
  st.env_hash = env.value();
  trace.add(env.value());
  st.trace_hash = trace.value();
  return st;
}

}  // namespace dtar::harness
