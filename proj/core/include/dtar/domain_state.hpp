#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "dtar/domain_graph.hpp"
#include "dtar/faults.hpp"
#include "dtar/nn/matrix.hpp"
#include "dtar/partition.hpp"
#include "dtar/traffic.hpp"

namespace dtar {

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// W_ij(t): EWMA of routed demand per inter-domain edge.
struct LinkLoadState {
  std::vector<double> load;

  static LinkLoadState zeros(const DomainGraph& dg) {
    return LinkLoadState{std::vector<double>(static_cast<std::size_t>(dg.num_edges()), 0.0)};
  }
};

struct RoutedDemand {
  int edge = -1;
  double demand = 0.0;
};

/// W <- rho * W, then W_e += demand for every routed traversal.
LinkLoadState update_link_loads(const LinkLoadState& state, const std::vector<RoutedDemand>& routed, double rho);

/// Population std / mean of the edge loads; 0 when the mean is 0.
double cv(const LinkLoadState& state);

/// BFS hop counts to dst over operational edges; kUnreachable when cut off.
std::vector<int> hop_distances(const DomainGraph& dg, const FaultState& faults, int dst);

/// BFS hop counts to dst over every edge, faulted or not.
std::vector<int> static_hop_distances(const DomainGraph& dg, int dst);

using ActionMask = std::vector<bool>;

/// mask[k] iff k is adjacent to current over a healthy edge and can still
/// reach dst within the remaining hop budget after moving there.
ActionMask action_mask(const DomainGraph& dg, const FaultState& faults, int current, int dst, int hops_taken,
                       int h_max);

/// Same rule with precomputed operational distances to dst.
ActionMask action_mask(const DomainGraph& dg, const FaultState& faults, const std::vector<int>& dist_to_dst,
                       int current, int hops_taken, int h_max);

inline bool any_admitted(const ActionMask& m) {
  for (bool b : m)
    if (b) return true;
  return false;
}

inline constexpr int kNodeFeatureDim = 6;
inline constexpr int kEdgeFeatureDim = 3;

/// K x 6 rows of (n_k, L_k, c_k, f_k, l_k, s_k).
nn::Matrix node_features(const DomainGraph& dg, const FaultState& faults, const std::vector<bool>& surge_domains,
                         const std::vector<double>& domain_loads);

/// Convenience overload computing domain loads from the traffic matrix.
nn::Matrix node_features(const DomainGraph& dg, const FaultState& faults, const SurgeHotspot* hotspot,
                         const TrafficMatrix& t, const DomainPartition& part);

/// E x 3 rows of (a_ij, W_ij / max W, B_ij) in edge-id order.
nn::Matrix edge_features(const DomainGraph& dg, const LinkLoadState& loads, const FaultState& faults);

/// Rank of each load among all domains (0 = lightest, ties by id) divided by K - 1.
std::vector<double> load_rank_index(const std::vector<double>& loads);

}  // namespace dtar
