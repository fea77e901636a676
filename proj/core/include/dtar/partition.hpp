#pragma once

#include <span>
#include <string>
#include <vector>

#include "dtar/constellation.hpp"

namespace dtar {

/// Assignment of every satellite to one of K domains.
class DomainPartition {
 public:
  DomainPartition() = default;
  DomainPartition(int num_domains, std::vector<int> labels);

  int num_domains() const { return num_domains_; }
  int num_sats() const { return static_cast<int>(labels_.size()); }
  int label(int sat) const { return labels_[static_cast<std::size_t>(sat)]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<int>& mutable_labels() { return labels_; }

  std::vector<int> domain_sizes() const;
  /// Member sets D_0..D_{K-1}, each sorted ascending.
  std::vector<std::vector<int>> members() const;

  friend bool operator==(const DomainPartition&, const DomainPartition&) = default;

 private:
  int num_domains_ = 0;
  std::vector<int> labels_;
};

struct SizeBounds {
  int min_size = 1;
  int max_size = 1;
};

/// Default bounds: floor(0.5 N/K) and ceil(1.5 N/K).
SizeBounds default_size_bounds(int num_sats, int num_domains);

/// K contiguous blocks of N/K satellites in plane-major node order.
DomainPartition uniform_partition(int num_sats, int num_domains);

/// True when the satellites labelled `domain` form a non-empty connected subgraph of g.
bool domain_connected(const SatGraph& g, std::span<const int> labels, int domain);

struct PartitionCheck {
  bool non_empty = true;
  bool within_bounds = true;
  bool connected = true;
  bool labels_in_range = true;
  bool ok() const { return non_empty && within_bounds && connected && labels_in_range; }
  std::string describe() const;
};

PartitionCheck check_partition(const DomainPartition& part, const SatGraph& g, const SizeBounds& bounds);

}  // namespace dtar
