#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "dtar/constellation.hpp"
#include "dtar/partition.hpp"

namespace dtar {

/// Bundle of physical ISLs between two domains (a < b).
struct DomainEdge {
  int a = 0;
  int b = 0;
  int isl_count = 0;

  int other(int d) const { return d == a ? b : a; }
};

struct DomainNeighbor {
  int domain = 0;
  int edge = 0;
};

/// Static domain-level graph derived from a partition. Edge ids follow
/// lexicographic (a, b) order.
class DomainGraph {
 public:
  DomainGraph() = default;
  DomainGraph(int num_domains, std::vector<DomainEdge> edges, std::vector<std::vector<int>> members);

  int num_domains() const { return num_domains_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<DomainEdge>& edges() const { return edges_; }
  const DomainEdge& edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
  /// -1 when the domains are not adjacent.
  int edge_id(int a, int b) const;
  bool adjacent(int a, int b) const { return edge_id(a, b) >= 0; }

  const std::vector<DomainNeighbor>& neighbors(int d) const { return adjacency_[static_cast<std::size_t>(d)]; }
  const std::vector<int>& members(int d) const { return members_[static_cast<std::size_t>(d)]; }
  int domain_size(int d) const { return static_cast<int>(members(d).size()); }
  /// c_k: number of physical ISLs leaving domain d.
  int cross_links(int d) const { return cross_links_[static_cast<std::size_t>(d)]; }
  int num_sats() const { return num_sats_; }

  /// BFS over every edge, ignoring faults.
  bool connected() const;

 private:
  int num_domains_ = 0;
  int num_sats_ = 0;
  std::vector<DomainEdge> edges_;
  std::vector<std::vector<DomainNeighbor>> adjacency_;
  std::vector<std::vector<int>> members_;
  std::vector<int> cross_links_;
  std::vector<int> edge_index_;  // dense K*K lookup
};

/// Throws std::runtime_error when the resulting domain graph is disconnected.
DomainGraph build_domain_graph(const DomainPartition& part, const SatGraph& g);

/// JSON export: {"k", "nodes": [{id, members, c_k}], "edges": [{i, j, isl_count}]}.
void write_domain_graph_json(std::ostream& os, const DomainGraph& dg);

}  // namespace dtar
