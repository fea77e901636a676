#include "dtar/domain_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace dtar {

LinkLoadState update_link_loads(const LinkLoadState& state, const std::vector<RoutedDemand>& routed, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("update_link_loads: rho must be in [0, 1)");
  LinkLoadState next = state;
  for (double& w : next.load) w *= rho;
  for (const auto& r : routed) {
    if (r.edge < 0 || r.edge >= static_cast<int>(next.load.size()))
      throw std::out_of_range("update_link_loads: bad edge id");
    if (r.demand < 0.0) throw std::invalid_argument("update_link_loads: negative demand");
    next.load[static_cast<std::size_t>(r.edge)] += r.demand;
  }
  return next;
}

double cv(const LinkLoadState& state) {
  const auto& w = state.load;
  if (w.empty()) return 0.0;
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  if (!(mean > 0.0)) return 0.0;
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n) / mean;
}

namespace {
std::vector<int> bfs_distances(const DomainGraph& dg, const FaultState* faults, int dst) {
  const int k = dg.num_domains();
  if (dst < 0 || dst >= k) throw std::out_of_range("hop_distances: dst out of range");
  std::vector<int> dist(static_cast<std::size_t>(k), kUnreachable);
  std::queue<int> q;
  dist[static_cast<std::size_t>(dst)] = 0;
  q.push(dst);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& nb : dg.neighbors(u)) {
      if (faults && faults->failed(nb.edge)) continue;
      auto& dv = dist[static_cast<std::size_t>(nb.domain)];
      if (dv == kUnreachable) {
        dv = dist[static_cast<std::size_t>(u)] + 1;
        q.push(nb.domain);
      }
    }
  }
  return dist;
}
}  // namespace

std::vector<int> hop_distances(const DomainGraph& dg, const FaultState& faults, int dst) {
  return bfs_distances(dg, &faults, dst);
}

std::vector<int> static_hop_distances(const DomainGraph& dg, int dst) {
  return bfs_distances(dg, nullptr, dst);
}

ActionMask action_mask(const DomainGraph& dg, const FaultState& faults, const std::vector<int>& dist_to_dst,
                       int current, int hops_taken, int h_max) {
  ActionMask mask(static_cast<std::size_t>(dg.num_domains()), false);
  const int budget = h_max - hops_taken - 1;
  if (budget < 0) return mask;
  for (const auto& nb : dg.neighbors(current)) {
    if (faults.failed(nb.edge)) continue;
    const int d = dist_to_dst[static_cast<std::size_t>(nb.domain)];
    if (d != kUnreachable && d <= budget) mask[static_cast<std::size_t>(nb.domain)] = true;
  }
  return mask;
}

ActionMask action_mask(const DomainGraph& dg, const FaultState& faults, int current, int dst, int hops_taken,
                       int h_max) {
  return action_mask(dg, faults, hop_distances(dg, faults, dst), current, hops_taken, h_max);
}

std::vector<double> load_rank_index(const std::vector<double>& loads) {
  const std::size_t k = loads.size();
  std::vector<double> out(k, 0.0);
  if (k <= 1) return out;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return loads[static_cast<std::size_t>(a)] < loads[static_cast<std::size_t>(b)];
  });
  for (std::size_t r = 0; r < k; ++r) {
    out[static_cast<std::size_t>(order[r])] = static_cast<double>(r) / static_cast<double>(k - 1);
  }
  return out;
}

nn::Matrix node_features(const DomainGraph& dg, const FaultState& faults, const std::vector<bool>& surge_domains,
                         const std::vector<double>& domain_loads) {
  const int k = dg.num_domains();
  nn::Matrix f(k, kNodeFeatureDim);
  const double avg_size = static_cast<double>(dg.num_sats()) / k;
  const double max_load = domain_loads.empty() ? 0.0 : *std::max_element(domain_loads.begin(), domain_loads.end());
  int max_cross = 0;
  for (int d = 0; d < k; ++d) max_cross = std::max(max_cross, dg.cross_links(d));
  const auto rank = load_rank_index(domain_loads);

  for (int d = 0; d < k; ++d) {
    const auto& nbs = dg.neighbors(d);
    int faulted = 0;
    for (const auto& nb : nbs) faulted += faults.failed(nb.edge) ? 1 : 0;
    f(d, 0) = dg.domain_size(d) / avg_size;
    f(d, 1) = max_load > 0.0 ? domain_loads[static_cast<std::size_t>(d)] / max_load : 0.0;
    f(d, 2) = max_cross > 0 ? static_cast<double>(dg.cross_links(d)) / max_cross : 0.0;
    f(d, 3) = nbs.empty() ? 0.0 : static_cast<double>(faulted) / static_cast<double>(nbs.size());
    f(d, 4) = rank[static_cast<std::size_t>(d)];
    f(d, 5) = surge_domains.empty() ? 0.0 : (surge_domains[static_cast<std::size_t>(d)] ? 1.0 : 0.0);
  }
  return f;
}

nn::Matrix node_features(const DomainGraph& dg, const FaultState& faults, const SurgeHotspot* hotspot,
                         const TrafficMatrix& t, const DomainPartition& part) {
  std::vector<bool> surge(static_cast<std::size_t>(dg.num_domains()), false);
  if (hotspot && hotspot->edge >= 0) {
    surge[static_cast<std::size_t>(hotspot->domain_a)] = true;
    surge[static_cast<std::size_t>(hotspot->domain_b)] = true;
  }
  return node_features(dg, faults, surge, domain_loads(t, part));
}

nn::Matrix edge_features(const DomainGraph& dg, const LinkLoadState& loads, const FaultState& faults) {
  const int m = dg.num_edges();
  nn::Matrix f(m, kEdgeFeatureDim);
  double max_w = 0.0;
  for (double w : loads.load) max_w = std::max(max_w, w);
  for (int e = 0; e < m; ++e) {
    f(e, 0) = faults.available_ratio(e);
    f(e, 1) = max_w > 0.0 ? loads.load[static_cast<std::size_t>(e)] / max_w : 0.0;
    f(e, 2) = faults.failed(e) ? 1.0 : 0.0;
  }
  return f;
}

}  // namespace dtar
