#include "dtar/agents/shortest_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace dtar::agents {

int hop_next_hop(const DomainGraph& dg, int current, int dst) {
  if (current == dst) return -1;
  const std::vector<int> dist = static_hop_distances(dg, dst);
  const int here = dist[static_cast<std::size_t>(current)];
  if (here == kUnreachable) return -1;
  int best = -1;
  for (const auto& nb : dg.neighbors(current)) {
    if (dist[static_cast<std::size_t>(nb.domain)] == here - 1 && (best < 0 || nb.domain < best)) best = nb.domain;
  }
  return best;
}

std::vector<double> weighted_distances(const DomainGraph& dg, const std::vector<double>& weights, int dst) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(dg.num_domains()), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(dst)] = 0.0;
  pq.emplace(0.0, dst);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& nb : dg.neighbors(u)) {
      const double nd = d + weights[static_cast<std::size_t>(nb.edge)];
      if (nd < dist[static_cast<std::size_t>(nb.domain)]) {
        dist[static_cast<std::size_t>(nb.domain)] = nd;
        pq.emplace(nd, nb.domain);
      }
    }
  }
  return dist;
}

int weighted_next_hop(const DomainGraph& dg, const std::vector<double>& weights, int current, int dst) {
  if (current == dst) return -1;
  const auto dist = weighted_distances(dg, weights, dst);
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& nb : dg.neighbors(current)) {
    const double c = weights[static_cast<std::size_t>(nb.edge)] + dist[static_cast<std::size_t>(nb.domain)];
    if (c < best_cost - 1e-12 || (std::abs(c - best_cost) <= 1e-12 && nb.domain < best)) {
      best_cost = c;
      best = nb.domain;
    }
  }
  return std::isfinite(best_cost) ? best : -1;
}

std::vector<double> elb_weights(const std::vector<double>& loads) {
  const double mean =
      loads.empty() ? 0.0 : std::accumulate(loads.begin(), loads.end(), 0.0) / static_cast<double>(loads.size());
  const double denom = std::max(mean, 1e-9);
  std::vector<double> w(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i) w[i] = 1.0 + loads[i] / denom;
  return w;
}

int DijkstraAgent::act(const DecisionState& s, Rng&) { return hop_next_hop(*s.step->dg, s.current, s.dst); }

void ElbAgent::begin_episode() {
  weights_.clear();
  have_snapshot_ = false;
}

void ElbAgent::set_snapshot(const std::vector<double>& loads) {
  weights_ = elb_weights(loads);
  have_snapshot_ = true;
}

void ElbAgent::end_step(const StepView&, const LinkLoadState& after) {
  if (!have_snapshot_) set_snapshot(after.load);
}

int ElbAgent::act(const DecisionState& s, Rng&) {
  const DomainGraph& dg = *s.step->dg;
  if (!have_snapshot_) return hop_next_hop(dg, s.current, s.dst);
  return weighted_next_hop(dg, weights_, s.current, s.dst);
}

}  // namespace dtar::agents
