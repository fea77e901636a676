#pragma once

#include <cstdint>
#include <vector>

#include "dtar/domain_graph.hpp"
#include "dtar/rng.hpp"

namespace dtar {

struct FaultConfig {
  double fail_prob = 0.02;
  double recover_prob = 0.02;

  void validate() const;
};

/// Per inter-domain edge fault flag B_ij. All physical ISLs of a bundle fail together.
class FaultState {
 public:
  FaultState() = default;
  static FaultState healthy(const DomainGraph& dg);

  int num_edges() const { return static_cast<int>(failed_.size()); }
  bool failed(int edge) const { return failed_[static_cast<std::size_t>(edge)] != 0; }
  void set_failed(int edge, bool f) { failed_[static_cast<std::size_t>(edge)] = f ? 1 : 0; }
  /// a_ij: 0 for a failed bundle, 1 otherwise.
  double available_ratio(int edge) const { return failed(edge) ? 0.0 : 1.0; }
  int num_failed() const;
  bool any_failed() const { return num_failed() > 0; }

  /// B_ij == 0. Throws std::invalid_argument when (di, dj) is not an edge.
  bool is_operational(const DomainGraph& dg, int di, int dj) const;

  friend bool operator==(const FaultState&, const FaultState&) = default;

 private:
  std::vector<std::uint8_t> failed_;
};

struct FaultEvent {
  int edge = -1;
  bool failed = false;  // false: recovery
};

/// True when the edges with B_ij == 0 connect all K domains.
bool operational_connected(const DomainGraph& dg, const FaultState& state);

/// One step of the fail/recover process. Recoveries apply first; candidate
/// failures then apply in edge-id order, skipping any that would disconnect
/// the operational graph. Exactly one uniform draw per edge per call.
FaultState step_faults(const FaultState& state, const FaultConfig& cfg, const DomainGraph& dg, Rng& rng,
                       std::vector<FaultEvent>* events = nullptr);

}  // namespace dtar
