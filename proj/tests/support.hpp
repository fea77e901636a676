#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "dtar/domain_graph.hpp"
#include "dtar/faults.hpp"
#include "dtar/rng.hpp"

namespace dtar::fixture {

/// Domain graph with one satellite per domain and one ISL per edge.
inline DomainGraph small_domain_graph(int k, const std::vector<std::pair<int, int>>& edges) {
  std::vector<DomainEdge> es;
  for (auto [a, b] : edges) es.push_back({std::min(a, b), std::max(a, b), 1});
  std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
  for (int d = 0; d < k; ++d) members[static_cast<std::size_t>(d)] = {d};
  return DomainGraph(k, std::move(es), std::move(members));
}

/// Random connected simple graph: a random spanning tree plus extra edges.
inline std::vector<std::pair<int, int>> random_connected_edges(int k, double extra_prob, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<char>> has(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
  for (int v = 1; v < k; ++v) {
    const int u = uniform_int(rng, 0, v - 1);
    edges.emplace_back(u, v);
    has[u][v] = has[v][u] = 1;
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (!has[a][b] && uniform01(rng) < extra_prob) {
        edges.emplace_back(a, b);
        has[a][b] = has[b][a] = 1;
      }
  return edges;
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

/// All-pairs hop counts over operational edges.
inline std::vector<std::vector<int>> floyd_warshall(const DomainGraph& dg, const FaultState& faults) {
  const int k = dg.num_domains();
  std::vector<std::vector<int>> d(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), kInf));
  for (int i = 0; i < k; ++i) d[i][i] = 0;
  for (int e = 0; e < dg.num_edges(); ++e) {
    if (faults.failed(e)) continue;
    d[dg.edge(e).a][dg.edge(e).b] = d[dg.edge(e).b][dg.edge(e).a] = 1;
  }
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
  return d;
}

/// Connectivity of the operational graph with one extra edge removed.
inline bool connected_without(const DomainGraph& dg, const FaultState& faults, int removed) {
  const int k = dg.num_domains();
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& nb : dg.neighbors(u)) {
      if (nb.edge == removed || faults.failed(nb.edge) || seen[nb.domain]) continue;
      seen[nb.domain] = 1;
      ++count;
      q.push(nb.domain);
    }
  }
  return count == k;
}

/// Edges whose removal disconnects the operational graph, by exhaustive deletion.
inline std::vector<int> brute_force_bridges(const DomainGraph& dg, const FaultState& faults) {
  std::vector<int> out;
  for (int e = 0; e < dg.num_edges(); ++e)
    if (!faults.failed(e) && !connected_without(dg, faults, e)) out.push_back(e);
  return out;
}

}  // namespace dtar::fixture
