#include "dtar/domain_graph.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace dtar {

DomainGraph::DomainGraph(int num_domains, std::vector<DomainEdge> edges,
                         std::vector<std::vector<int>> members)
    : num_domains_(num_domains), edges_(std::move(edges)), members_(std::move(members)) {
  const auto K = static_cast<std::size_t>(num_domains_);
  std::sort(edges_.begin(), edges_.end(),
            [](const DomainEdge& x, const DomainEdge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  adjacency_.assign(K, {});
  cross_links_.assign(K, 0);
  edge_index_.assign(K * K, -1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    const int id = static_cast<int>(e);
    adjacency_[static_cast<std::size_t>(ed.a)].push_back({ed.b, id});
    adjacency_[static_cast<std::size_t>(ed.b)].push_back({ed.a, id});
    cross_links_[static_cast<std::size_t>(ed.a)] += ed.isl_count;
    cross_links_[static_cast<std::size_t>(ed.b)] += ed.isl_count;
    edge_index_[static_cast<std::size_t>(ed.a) * K + static_cast<std::size_t>(ed.b)] = id;
    edge_index_[static_cast<std::size_t>(ed.b) * K + static_cast<std::size_t>(ed.a)] = id;
  }
  for (auto& nb : adjacency_) {
    std::sort(nb.begin(), nb.end(),
              [](const DomainNeighbor& x, const DomainNeighbor& y) { return x.domain < y.domain; });
  }
  for (const auto& m : members_) num_sats_ += static_cast<int>(m.size());
}

int DomainGraph::edge_id(int a, int b) const {
  if (a < 0 || b < 0 || a >= num_domains_ || b >= num_domains_) return -1;
  return edge_index_[static_cast<std::size_t>(a) * static_cast<std::size_t>(num_domains_) +
                     static_cast<std::size_t>(b)];
}

bool DomainGraph::connected() const {
  if (num_domains_ <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(num_domains_), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& nb : neighbors(u)) {
      if (!seen[static_cast<std::size_t>(nb.domain)]) {
        seen[static_cast<std::size_t>(nb.domain)] = 1;
        ++count;
        q.push(nb.domain);
      }
    }
  }
  return count == num_domains_;
}

DomainGraph build_domain_graph(const DomainPartition& part, const SatGraph& g) {
  if (part.num_sats() != g.size()) throw std::invalid_argument("build_domain_graph: size mismatch");
  std::map<std::pair<int, int>, int> counts;
  for (const auto& [i, j] : g.edges()) {
    const int a = part.label(i);
    const int b = part.label(j);
    if (a == b) continue;
    ++counts[{std::min(a, b), std::max(a, b)}];
  }
  std::vector<DomainEdge> edges;
  edges.reserve(counts.size());
  for (const auto& [key, n] : counts) edges.push_back({key.first, key.second, n});
  DomainGraph dg(part.num_domains(), std::move(edges), part.members());
  if (!dg.connected()) throw std::runtime_error("build_domain_graph: domain graph is disconnected");
  return dg;
}

void write_domain_graph_json(std::ostream& os, const DomainGraph& dg) {
  nlohmann::json j;
  j["k"] = dg.num_domains();
  j["nodes"] = nlohmann::json::array();
  for (int d = 0; d < dg.num_domains(); ++d) {
    j["nodes"].push_back({{"id", d}, {"members", dg.members(d)}, {"c_k", dg.cross_links(d)}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : dg.edges()) j["edges"].push_back({{"i", e.a}, {"j", e.b}, {"isl_count", e.isl_count}});
  os << j.dump(2) << '\n';
}

}  // namespace dtar
