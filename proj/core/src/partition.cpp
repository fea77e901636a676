#include "dtar/partition.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace dtar {

DomainPartition::DomainPartition(int num_domains, std::vector<int> labels)
    : num_domains_(num_domains), labels_(std::move(labels)) {
  if (num_domains_ < 1) throw std::invalid_argument("partition: K must be >= 1");
}

std::vector<int> DomainPartition::domain_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(num_domains_), 0);
  for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::vector<std::vector<int>> DomainPartition::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_domains_));
  for (int i = 0; i < num_sats(); ++i) out[static_cast<std::size_t>(label(i))].push_back(i);
  return out;
}

SizeBounds default_size_bounds(int num_sats, int num_domains) {
  const double avg = static_cast<double>(num_sats) / num_domains;
  SizeBounds b;
  b.min_size = std::max(1, static_cast<int>(std::floor(0.5 * avg)));
  b.max_size = static_cast<int>(std::ceil(1.5 * avg));
  return b;
}

DomainPartition uniform_partition(int num_sats, int num_domains) {
  if (num_domains < 1 || num_domains > num_sats)
    throw std::invalid_argument("uniform_partition: need 1 <= K <= N");
  std::vector<int> labels(static_cast<std::size_t>(num_sats));
  for (int i = 0; i < num_sats; ++i) {
    // block k covers [k*N/K, (k+1)*N/K) with integer rounding spread evenly
    labels[static_cast<std::size_t>(i)] =
        static_cast<int>(static_cast<long long>(i) * num_domains / num_sats);
  }
  return DomainPartition(num_domains, std::move(labels));
}

bool domain_connected(const SatGraph& g, std::span<const int> labels, int domain) {
  int start = -1;
  int total = 0;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[static_cast<std::size_t>(i)] == domain) {
      if (start < 0) start = i;
      ++total;
    }
  }
  if (total == 0) return false;
  std::vector<char> seen(labels.size(), 0);
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g.neighbors(u)) {
      if (!seen[static_cast<std::size_t>(v)] && labels[static_cast<std::size_t>(v)] == domain) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == total;
}

std::string PartitionCheck::describe() const {
  if (ok()) return "ok";
  std::string s;
  if (!labels_in_range) s += "labels-out-of-range ";
  if (!non_empty) s += "empty-domain ";
  if (!within_bounds) s += "size-bounds ";
  if (!connected) s += "disconnected-domain ";
  s.pop_back();
  return s;
}

PartitionCheck check_partition(const DomainPartition& part, const SatGraph& g, const SizeBounds& bounds) {
  PartitionCheck c;
  if (part.num_sats() != g.size()) {
    c.labels_in_range = false;
    return c;
  }
  for (int l : part.labels()) {
    if (l < 0 || l >= part.num_domains()) {
      c.labels_in_range = false;
      return c;
    }
  }
  const auto sizes = part.domain_sizes();
  for (int k = 0; k < part.num_domains(); ++k) {
    const int sz = sizes[static_cast<std::size_t>(k)];
    if (sz == 0) c.non_empty = false;
    if (sz < bounds.min_size || sz > bounds.max_size) c.within_bounds = false;
    if (sz > 0 && !domain_connected(g, part.labels(), k)) c.connected = false;
  }
  return c;
}

}  // namespace dtar
