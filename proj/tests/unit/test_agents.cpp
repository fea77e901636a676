#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numeric>
#include <filesystem>
#include <sstream>

#include "dtar/agents/dqn.hpp"
#include "dtar/agents/dtar_agent.hpp"
#include "dtar/agents/observation.hpp"
#include "dtar/agents/ppo.hpp"
#include "dtar/agents/qrlsn.hpp"
#include "dtar/agents/reward.hpp"
#include "dtar/agents/shortest_path.hpp"
#include "dtar/nn/distributions.hpp"
#include "fixtures.hpp"

using namespace dtar;
using namespace dtar::agents;
using dtar::fixture::random_matrix;

namespace {

/// Owns everything a DecisionState points at.
struct Env {
  DomainGraph dg;
  FaultState faults;
  LinkLoadState loads;
  StepView step;
  std::vector<int> dist;

  explicit Env(DomainGraph g, Rng* rng = nullptr) : dg(std::move(g)) {
    faults = FaultState::healthy(dg);
    loads = LinkLoadState::zeros(dg);
    refresh(rng);
  }
  void refresh(Rng* rng = nullptr) {
    step.dg = &dg;
    step.faults = &faults;
    step.loads = &loads;
    step.t = 5;
    step.steps_per_episode = 144;
    step.cv = 0.7;
    step.any_fault = faults.any_failed();
    if (rng) step.snapshot = fixture::random_snapshot(dg.num_domains(), *rng);
  }
  DecisionState decision(int current, int dst, int hops = 0, int h_max = 9) {
    dist = hop_distances(dg, faults, dst);
    DecisionState s;
    s.step = &step;
    s.current = current;
    s.dst = dst;
    s.hops_taken = hops;
    s.h_max = h_max;
    s.dist_to_dst = &dist;
    s.mask = action_mask(dg, faults, dist, current, hops, h_max);
    return s;
  }
};

DomainGraph ring_dg(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return fixture::small_domain_graph(k, e);
}

/// Next hop from an all-pairs distance table: smallest-id neighbour one hop closer.
int oracle_next_hop(const DomainGraph& dg, const std::vector<std::vector<int>>& d, int c, int dst) {
  for (int a = 0; a < dg.num_domains(); ++a)
    if (dg.adjacent(c, a) && d[a][dst] + 1 == d[c][dst]) return a;
  return -1;
}

}  // namespace

TEST(Observation, Lengths) {
  EXPECT_EQ(observation_size(18), 89);
  EXPECT_EQ(observation_size(6), 77);
  Rng rng = make_rng(1, 1);
  Env env(ring_dg(6), &rng);
  const auto s = env.decision(0, 3);
  const auto obs = build_observation(random_matrix(6, 32, rng), s);
  EXPECT_EQ(obs.size(), 77);
  EXPECT_EQ(static_observation(s).size(), 77);
}

TEST(Observation, DistanceSentinelAndGlobals) {
  Rng rng = make_rng(2, 2);
  Env env(ring_dg(6), &rng);
  env.step.surge = true;
  const auto s = env.decision(0, 3);
  const auto aux = observation_aux(s);
  ASSERT_EQ(aux.size(), aux_size(6));
  for (int d = 0; d < 6; ++d) {
    const double v = aux(3 + d);
    if (d == 1 || d == 5) EXPECT_DOUBLE_EQ(v, 2.0 / 6.0);
    else EXPECT_EQ(v, -1.0);
  }
  EXPECT_DOUBLE_EQ(aux(9), 5.0 / 144.0);
  EXPECT_DOUBLE_EQ(aux(10), 0.35);
  EXPECT_EQ(aux(11), 1.0);
  EXPECT_EQ(aux(12), 0.0);
  const auto st = static_observation(s);
  EXPECT_EQ(st(64 + 9 + 1), 0.0);
  EXPECT_EQ(st(64 + 9 + 2), 0.0);
}

TEST(Reward, Examples) {
  const RewardConfig cfg;
  EXPECT_NEAR(step_reward(3, 2, 1, StepOutcome::kStep, cfg), 0.95, 1e-12);
  EXPECT_NEAR(step_reward(1, 0, 3, StepOutcome::kArrived, cfg), 5.80, 1e-12);
  EXPECT_NEAR(step_reward(2, 2, 0, StepOutcome::kFailed, cfg, false), -5.0, 1e-12);
  EXPECT_NEAR(step_reward(2, 3, 2, StepOutcome::kStep, cfg), -1.05, 1e-12);
}

TEST(Gae, HandRecursion) {
  const std::vector<double> r{1, 0, 2}, v{0.5, 0.5, 0.5};
  const bool d[] = {false, false, true};
  const auto g = gae(r, v, d, 123.0, 0.9, 0.8);
  // delta = (0.95, -0.05, 1.5); A = delta + 0.72 * A_next
  EXPECT_NEAR(g.advantages[2], 1.5, 1e-12);
  EXPECT_NEAR(g.advantages[1], -0.05 + 0.72 * 1.5, 1e-12);
  EXPECT_NEAR(g.advantages[0], 0.95 + 0.72 * (-0.05 + 0.72 * 1.5), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.returns[i], g.advantages[i] + 0.5, 1e-12);
}

TEST(Gae, Limits) {
  Rng rng = make_rng(3, 3);
  const int n = 20;
  std::vector<double> r(n), v(n);
  std::unique_ptr<bool[]> d(new bool[n]);
  for (int i = 0; i < n; ++i) {
    r[i] = uniform01(rng);
    v[i] = uniform01(rng);
    d[i] = uniform01(rng) < 0.2;
  }
  const std::span<const bool> dones(d.get(), n);
  const auto td = gae(r, v, dones, 0.4, 0.9, 0.0);
  for (int i = 0; i < n; ++i) {
    const double next = i + 1 < n ? v[i + 1] : 0.4;
    EXPECT_NEAR(td.advantages[i], r[i] + 0.9 * next * (d[i] ? 0.0 : 1.0) - v[i], 1e-12);
  }
  const std::vector<double> zeros(n, 0.0);
  const auto mc = gae(r, zeros, dones, 0.0, 1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = i; j < n; ++j) {
      s += r[j];
      if (d[j]) break;
    }
    EXPECT_NEAR(mc.advantages[i], s, 1e-12);
  }
}

TEST(Ppo, UnchangedPolicyHasZeroPolicyLoss) {
  Rng rng = make_rng(4, 4);
  ActorCritic net(5, EncoderKind::kGat, rng);
  auto buf = fixture::random_buffer(net, 5, 16, rng);
  // reset stored log-probs to the current policy
  RolloutBuffer same(16);
  {
    std::vector<const GraphSnapshot*> snaps;
    std::vector<int> idx, cur, dst;
    nn::Matrix aux(16, aux_size(5)), mask(16, 5);
    for (int i = 0; i < 16; ++i) {
      const auto& e = buf.at(i);
      snaps.push_back(e.snapshot.get());
      idx.push_back(i);
      cur.push_back(e.current);
      dst.push_back(e.dst);
      aux.row(i) = e.aux;
      mask.row(i) = nn::mask_row(e.mask);
    }
    nn::NoGradGuard g;
    const auto out = net.forward(snaps, idx, cur, dst, aux, mask);
    for (int i = 0; i < 16; ++i) {
      auto e = buf.at(i);
      e.log_prob = out.log_probs.value()(i, e.action);
      same.add(e);
    }
  }
  same.compute_gae(0.0, 0.99, 0.95);
  std::vector<double> adv(16);
  for (auto& a : adv) a = uniform01(rng) - 0.3;
  const auto norm = normalize_advantages(adv);
  std::vector<int> idx(16);
  std::iota(idx.begin(), idx.end(), 0);
  PpoConfig cfg;
  PpoLossStats st;
  ppo_loss(net, same, idx, norm, cfg, &st);
  EXPECT_NEAR(st.policy_loss, 0.0, 1e-12);
  EXPECT_EQ(st.clip_fraction, 0.0);
  EXPECT_NEAR(st.total, st.policy_loss + cfg.value_coef * st.value_loss - cfg.entropy_coef * st.entropy, 1e-12);
  EXPECT_GT(st.entropy, 0.0);
}

TEST(Ppo, ClippedSurrogateClosedForm) {
  Rng rng = make_rng(5, 5);
  ActorCritic net(4, EncoderKind::kGat, rng);
  auto base = fixture::random_buffer(net, 4, 1, rng);
  auto entry = base.at(0);
  double logp_now = 0.0;
  {
    const GraphSnapshot* snaps[] = {entry.snapshot.get()};
    const int zero[] = {0};
    const int cur[] = {entry.current};
    const int dst[] = {entry.dst};
    nn::Matrix aux = entry.aux;
    nn::NoGradGuard g;
    logp_now = net.forward(snaps, zero, cur, dst, aux, nn::mask_row(entry.mask)).log_probs.value()(0, entry.action);
  }
  PpoConfig cfg;
  cfg.entropy_coef = 0.0;
  cfg.value_coef = 0.0;
  const int idx[] = {0};
  for (double ratio : {1.5, 1.1, 0.6}) {
    for (double a : {1.0, -1.0}) {
      RolloutBuffer one(1);
      auto e = entry;
      e.log_prob = logp_now - std::log(ratio);
      one.add(e);
      one.compute_gae(0.0, 0.99, 0.95);
      const double adv[] = {a};
      const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
      const double expect = -std::min(ratio * a, clipped * a);
      EXPECT_NEAR(ppo_loss(net, one, idx, adv, cfg).item(), expect, 1e-9) << ratio << " " << a;
    }
  }
}

TEST(Ppo, LossGradientMatchesFiniteDifferences) {
  Rng rng = make_rng(6, 6);
  ActorCritic net(5, EncoderKind::kGat, rng);
  const auto buf = fixture::random_buffer(net, 5, 8, rng);
  std::vector<double> adv(8);
  for (auto& a : adv) a = 2.0 * uniform01(rng) - 1.0;
  std::vector<int> idx(8);
  std::iota(idx.begin(), idx.end(), 0);
  const PpoConfig cfg;
  const auto r = fixture::gradcheck(net.parameters(), [&] { return ppo_loss(net, buf, idx, adv, cfg); }, 1e-5, 13);
  EXPECT_LT(r.max_rel, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 1000u);
}

TEST(Ppo, UpdateChangesParametersAndIsDeterministic) {
  auto run = [] {
    Rng rng = make_rng(7, 7);
    ActorCritic net(5, EncoderKind::kGat, rng);
    auto buf = fixture::random_buffer(net, 5, 32, rng);
    buf.compute_gae(0.0, 0.99, 0.95);
    PpoConfig cfg;
    cfg.batch_size = 8;
    cfg.epochs = 2;
    nn::Adam adam({cfg.lr});
    Rng mb = make_rng(7, Stream::kMinibatch);
    const auto before = net.parameters()[0].tensor.value();
    const auto st = ppo_update(net, adam, buf, cfg, mb);
    EXPECT_EQ(st.minibatches, 8);
    EXPECT_NE(before, net.parameters()[0].tensor.value());
    return net.parameters().back().tensor.value();
  };
  EXPECT_EQ(run(), run());
}

TEST(Policy, MaskedHeadsAndFiniteValues) {
  Rng rng = make_rng(8, 8);
  ActorCritic net(6, EncoderKind::kGat, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const auto obs = random_matrix(1, observation_size(6), rng, 10.0);
    const auto [logits, value] = net.heads(obs);
    EXPECT_TRUE(std::isfinite(value));
    ASSERT_EQ(logits.size(), 6);
    std::vector<bool> mask(6, false);
    mask[static_cast<std::size_t>(trial % 6)] = true;
    const nn::MaskedCategorical d(logits, mask);
    EXPECT_EQ(d.sample(rng), trial % 6);
    for (int a = 0; a < 6; ++a)
      if (a != trial % 6) EXPECT_LE(d.log_prob(a), -20.0);
  }
  ActorCritic mlp(6, EncoderKind::kMlp, rng);
  const auto snap = fixture::random_snapshot(6, rng);
  EXPECT_EQ(mlp.embed(*snap).cols(), 32);
}

TEST(ShortestPath, DijkstraMatchesDistanceOracle) {
  Rng rng = make_rng(9, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = uniform_int(rng, 2, 12);
    const auto dg = fixture::small_domain_graph(k, fixture::random_connected_edges(k, 0.3, rng));
    const auto d = fixture::floyd_warshall(dg, FaultState::healthy(dg));
    for (int c = 0; c < k; ++c)
      for (int t = 0; t < k; ++t) {
        if (c == t) continue;
        ASSERT_EQ(hop_next_hop(dg, c, t), oracle_next_hop(dg, d, c, t));
        // unit weights give the same answer
        ASSERT_EQ(weighted_next_hop(dg, std::vector<double>(dg.num_edges(), 1.0), c, t), hop_next_hop(dg, c, t));
      }
  }
}

TEST(ShortestPath, DijkstraIgnoresFaults) {
  Env env(fixture::small_domain_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  env.faults.set_failed(env.dg.edge_id(0, 2), true);
  env.refresh();
  DijkstraAgent agent;
  Rng rng = make_rng(1, 1);
  auto s = env.decision(0, 2);
  EXPECT_FALSE(s.mask[2]);
  EXPECT_EQ(agent.act(s, rng), 2);
}

TEST(ShortestPath, ElbPrefersUnloadedBranch) {
  const auto dg = fixture::small_domain_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  std::vector<double> loads(4, 0.0);
  EXPECT_EQ(weighted_next_hop(dg, elb_weights(loads), 0, 3), 1);
  loads[dg.edge_id(0, 1)] = 10.0;
  EXPECT_EQ(weighted_next_hop(dg, elb_weights(loads), 0, 3), 2);
  const auto w = elb_weights({2.0, 0.0, 4.0, 2.0});
  EXPECT_EQ(w, (std::vector<double>{2.0, 1.0, 3.0, 2.0}));
}

TEST(ShortestPath, ElbSnapshotIsFixedWithinEpisode) {
  Env env(fixture::small_domain_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  ElbAgent agent;
  Rng rng = make_rng(1, 1);
  agent.begin_episode();
  EXPECT_EQ(agent.act(env.decision(0, 3), rng), 1);
  LinkLoadState after = LinkLoadState::zeros(env.dg);
  after.load[env.dg.edge_id(0, 1)] = 5.0;
  agent.end_step(env.step, after);
  EXPECT_EQ(agent.act(env.decision(0, 3), rng), 2);
  // later load changes do not move the snapshot
  LinkLoadState later = LinkLoadState::zeros(env.dg);
  later.load[env.dg.edge_id(0, 2)] = 50.0;
  agent.end_step(env.step, later);
  EXPECT_EQ(agent.act(env.decision(0, 3), rng), 2);
  agent.begin_episode();
  EXPECT_EQ(agent.act(env.decision(0, 3), rng), 1);
}

TEST(Qrlsn, GreedyRespectsMask) {
  QTable q(3);
  q(0, 2, 0) = 9.0;
  q(0, 2, 1) = 1.0;
  q(0, 2, 2) = 5.0;
  EXPECT_EQ(q.greedy(0, 2, {true, true, true}), 0);
  EXPECT_EQ(q.greedy(0, 2, {false, true, true}), 2);
  EXPECT_EQ(q.greedy(0, 2, {false, false, false}), -1);
  EXPECT_EQ(q.max_admitted(0, 2, {false, true, false}), 1.0);
  std::stringstream ss;
  q.write(ss);
  const auto r = QTable::read(ss);
  EXPECT_EQ(r.data(), q.data());
}

TEST(Qrlsn, BellmanUpdate) {
  Env env(ring_dg(4));
  QrlsnConfig cfg;
  QrlsnAgent agent(4, cfg);
  agent.set_training(true);
  auto& q = agent.table();
  q(1, 2, 2) = 3.0;
  q(1, 2, 0) = -1.0;
  Rng rng = make_rng(1, 1);
  auto s = env.decision(0, 2);
  const int a = agent.act(s, rng);
  ASSERT_TRUE(a == 1 || a == 3);
  q(0, 2, a) = 0.5;
  auto next = env.decision(a, 2, 1);
  agent.feedback({-0.05, false, &next});
  const double target = -0.05 + cfg.gamma * q.max_admitted(a, 2, next.mask);
  EXPECT_NEAR(q(0, 2, a), 0.5 + cfg.alpha * (target - 0.5), 1e-12);
  if (a == 1) {
    EXPECT_NEAR(q_target(q, -0.05, false, 1, 2, next.mask, cfg.gamma), -0.05 + cfg.gamma * 3.0, 1e-12);
  }
  EXPECT_EQ(q_target(q, 4.0, true, 1, 2, next.mask, cfg.gamma), 4.0);
}

TEST(Qrlsn, FullExplorationStaysInMask) {
  Env env(ring_dg(6));
  env.faults.set_failed(env.dg.edge_id(0, 1), true);
  env.refresh();
  QrlsnAgent agent(6, QrlsnConfig{});
  agent.set_training(true);
  Rng rng = make_rng(2, 2);
  for (int i = 0; i < 2000; ++i) {
    auto s = env.decision(0, 3);
    ASSERT_EQ(agent.act(s, rng), 5);
    agent.feedback({0.0, true, nullptr});
  }
}

TEST(Dqn, TargetSyncCopiesParameters) {
  CdparAgent agent(5, DqnConfig{}, 3);
  nn::ParameterList qp, tp;
  agent.q_network().parameters(qp, "q");
  agent.target_network().parameters(tp, "q");
  qp[0].tensor.mutable_value()(0, 0) += 1.0;
  EXPECT_NE(qp[0].tensor.value(), tp[0].tensor.value());
  agent.sync_target();
  for (std::size_t i = 0; i < qp.size(); ++i) {
    EXPECT_EQ(qp[i].tensor.value(), tp[i].tensor.value());
    EXPECT_NE(qp[i].tensor.node(), tp[i].tensor.node());
  }
}

TEST(Dqn, TdTargetAndLoss) {
  nn::RowVector tq(3);
  tq << 1.0, 7.0, 2.0;
  EXPECT_EQ(td_target(0.5, true, tq, {true, true, true}, 0.9), 0.5);
  EXPECT_NEAR(td_target(0.5, false, tq, {true, false, true}, 0.9), 0.5 + 0.9 * 2.0, 1e-12);

  Rng rng = make_rng(10, 10);
  nn::Mlp q({4, 6, 3}, nn::Activation::kTanh, rng);
  nn::Mlp target({4, 6, 3}, nn::Activation::kTanh, rng);
  DqnTransition t;
  t.obs = random_matrix(1, 4, rng);
  t.next_obs = random_matrix(1, 4, rng);
  t.action = 1;
  t.reward = 0.3;
  t.next_mask = {true, true, false};
  t.done = false;
  const std::vector<const DqnTransition*> batch{&t};
  const double loss = dqn_loss(q, target, batch, 0.99).item();
  const auto qs = q.forward(nn::Tensor::constant(t.obs)).value();
  const auto nq = target.forward(nn::Tensor::constant(t.next_obs)).value();
  const double y = 0.3 + 0.99 * std::max(nq(0, 0), nq(0, 1));
  EXPECT_NEAR(loss, (qs(0, 1) - y) * (qs(0, 1) - y), 1e-12);
}

TEST(Dqn, ActsInsideMaskAndLearns) {
  Rng snap_rng = make_rng(2, 2);
  Env env(ring_dg(6), &snap_rng);
  DqnConfig cfg;
  cfg.learning_starts = 8;
  cfg.batch_size = 4;
  cfg.train_freq = 2;
  CdparAgent agent(6, cfg, 4);
  agent.set_training(true);
  Rng rng = make_rng(3, 3);
  for (int i = 0; i < 40; ++i) {
    auto s = env.decision(0, 3);
    const int a = agent.act(s, rng);
    ASSERT_TRUE(s.mask[a]);
    auto next = env.decision(a, 3, 1);
    agent.feedback({0.95, false, &next});
  }
  EXPECT_EQ(agent.replay_size(), 40u);
  EXPECT_GT(agent.gradient_steps(), 0);
}

TEST(DtarAgent, ActsInsideMaskAndRoundTripsCheckpoint) {
  Rng rng = make_rng(11, 11);
  Env env(ring_dg(6), &rng);
  PpoConfig cfg;
  cfg.n_steps = 16;
  cfg.batch_size = 8;
  cfg.epochs = 1;
  DtarAgent agent(AgentKind::kDtar, 6, cfg, 5);
  agent.set_training(true);
  for (int flow = 0; flow < 12; ++flow) {
    // budget 3 on a 6-ring from 0 to 3 leaves only shortest paths
    auto s = env.decision(0, 3, 0, 3);
    const int a = agent.act(s, rng);
    ASSERT_TRUE(s.mask[a]);
    auto next = env.decision(a, 3, 1, 3);
    agent.feedback({0.95, false, &next});
    const int b = agent.act(next, rng);
    ASSERT_TRUE(next.mask[b]);
    auto third = env.decision(b, 3, 2, 3);
    agent.feedback({0.95, false, &third});
    EXPECT_EQ(agent.act(third, rng), 3);
    agent.feedback({5.8, true, nullptr});
  }
  EXPECT_GE(agent.updates(), 1);

  const auto dir = std::filesystem::temp_directory_path() / "dtar_agent_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "dtar.ckpt").string();
  agent.save(path);
  DtarAgent other(AgentKind::kDtar, 6, cfg, 99);
  other.load(path);
  EXPECT_EQ(other.updates(), agent.updates());
  const auto pa = agent.network().parameters();
  const auto pb = other.network().parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].tensor.value(), pb[i].tensor.value());

  agent.set_training(false);
  other.set_training(false);
  auto s = env.decision(0, 3);
  EXPECT_EQ(agent.act(s, rng), other.act(s, rng));
  std::filesystem::remove_all(dir);
}

TEST(Ablation, UniformPartitionBlocks) {
  const auto p = uniform_partition(48, 6);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(p.label(i), 0);
  for (int s : p.domain_sizes()) EXPECT_EQ(s, 8);
  EXPECT_EQ(parse_agent_kind("dtar_mlp"), AgentKind::kDtarMlp);
  EXPECT_EQ(parse_agent_kind("CDPAR"), AgentKind::kCdparDqn);
  EXPECT_FALSE(parse_agent_kind("nope").has_value());
  for (auto k : all_agent_kinds()) EXPECT_EQ(parse_agent_kind(to_string(k)), k);
}
