#include "dtar/faults.hpp"

#include <numeric>
#include <queue>
#include <stdexcept>

namespace dtar {

void FaultConfig::validate() const {
  if (!(fail_prob >= 0.0 && fail_prob <= 1.0)) throw std::invalid_argument("faults: fail_prob must be in [0, 1]");
  if (!(recover_prob >= 0.0 && recover_prob <= 1.0))
    throw std::invalid_argument("faults: recover_prob must be in [0, 1]");
}

FaultState FaultState::healthy(const DomainGraph& dg) {
  FaultState s;
  s.failed_.assign(static_cast<std::size_t>(dg.num_edges()), 0);
  return s;
}

int FaultState::num_failed() const {
  return std::accumulate(failed_.begin(), failed_.end(), 0);
}

bool FaultState::is_operational(const DomainGraph& dg, int di, int dj) const {
  const int e = dg.edge_id(di, dj);
  if (e < 0) throw std::invalid_argument("is_operational: domains are not adjacent");
  return !failed(e);
}

bool operational_connected(const DomainGraph& dg, const FaultState& state) {
  const int k = dg.num_domains();
  if (k <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& nb : dg.neighbors(u)) {
      if (state.failed(nb.edge) || seen[static_cast<std::size_t>(nb.domain)]) continue;
      seen[static_cast<std::size_t>(nb.domain)] = 1;
      ++count;
      q.push(nb.domain);
    }
  }
  return count == k;
}

FaultState step_faults(const FaultState& state, const FaultConfig& cfg, const DomainGraph& dg, Rng& rng,
                       std::vector<FaultEvent>* events) {
  const int m = dg.num_edges();
  if (state.num_edges() != m) throw std::invalid_argument("step_faults: state does not match domain graph");

  std::vector<double> draws(static_cast<std::size_t>(m));
  for (auto& u : draws) u = uniform01(rng);

  FaultState next = state;
  for (int e = 0; e < m; ++e) {
    if (state.failed(e) && draws[static_cast<std::size_t>(e)] < cfg.recover_prob) {
      next.set_failed(e, false);
      if (events) events->push_back({e, false});
    }
  }
  for (int e = 0; e < m; ++e) {
    if (state.failed(e) || !(draws[static_cast<std::size_t>(e)] < cfg.fail_prob)) continue;
    next.set_failed(e, true);
    if (!operational_connected(dg, next)) {
      next.set_failed(e, false);  // bridge of the operational graph
      continue;
    }
    if (events) events->push_back({e, true});
  }
  return next;
}

}  // namespace dtar
