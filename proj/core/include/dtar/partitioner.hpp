#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dtar/constellation.hpp"
#include "dtar/partition.hpp"
#include "dtar/rng.hpp"
#include "dtar/traffic.hpp"

namespace dtar {

/// Raised when repair cannot satisfy the partition constraints.
class RepairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Objectives {
  double idtr = 0.0;     // maximised
  double sigma_l = 0.0;  // minimised
};

struct Individual {
  DomainPartition partition;
  Objectives obj;
  int rank = 0;
  double crowding = 0.0;
};

struct Nsga2Config {
  int population = 100;
  int generations = 200;
  double crossover_prob = 0.9;
  double mutation_prob = 0.9;
  int tournament_size = 2;
  /// Zero means default_size_bounds(N, K).
  SizeBounds bounds{0, 0};
  /// Upper limit on random mutations applied to each seeded initial individual.
  int init_mutations = 0;  // 0: N / 4

  void validate(int num_sats, int num_domains) const;
  SizeBounds effective_bounds(int num_sats, int num_domains) const;
};

/// Fraction of traffic whose endpoints share a domain. Throws on zero traffic.
double idtr(const DomainPartition& part, const TrafficMatrix& t);

/// Population standard deviation of the values.
double population_std(std::span<const double> values);

/// Population standard deviation of the per-domain loads L_d.
double load_deviation(const DomainPartition& part, const TrafficMatrix& t);

/// a dominates b: no worse on both objectives, strictly better on one.
bool dominates(const Objectives& a, const Objectives& b);

/// Fast non-dominated sort; fronts hold indices into objs, front 0 first.
std::vector<std::vector<int>> nondominated_sort(std::span<const Objectives> objs);

/// Crowding distance of each member of one front, in the given order.
std::vector<double> crowding_distance(std::span<const Objectives> front);

/// Single-point crossover at a fixed cut: c1 = p1[0, k) + p2[k, N).
std::pair<std::vector<int>, std::vector<int>> crossover_at(const std::vector<int>& p1, const std::vector<int>& p2,
                                                           int cut);

/// Single-point crossover with cut ~ Uniform[1, N-1]. Children are not repaired.
std::pair<std::vector<int>, std::vector<int>> crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                                                        Rng& rng);

enum class MutationMode { kIntraOrbit, kTrafficAware, kBoundary };

/// 0.60 intra-orbit, 0.20 traffic-aware, 0.20 boundary.
MutationMode draw_mutation_mode(Rng& rng);

/// True when the satellite has a neighbor in another domain.
bool is_border_node(const SatGraph& g, std::span<const int> labels, int sat);

/// Reassigns one random satellite to the label of a same-plane ring neighbor.
std::vector<int> mutate_intra_orbit(const std::vector<int>& labels, const SatGraph& g, Rng& rng);

/// Moves the best border node from the most to the least loaded domain;
/// returns the input unchanged when every candidate move raises sigma_L.
std::vector<int> mutate_traffic_aware(const std::vector<int>& labels, int num_domains, const SatGraph& g,
                                      std::span<const double> node_loads);

/// Reassigns a random border node to a random adjacent domain.
std::vector<int> mutate_boundary(const std::vector<int>& labels, const SatGraph& g, Rng& rng);

struct MutationResult {
  DomainPartition partition;
  MutationMode mode = MutationMode::kIntraOrbit;
};

/// Draws a mode, applies it, then repairs.
MutationResult mutate(const DomainPartition& part, const SatGraph& g, std::span<const double> node_loads,
                      const SizeBounds& bounds, Rng& rng);

/// Five-stage constraint repair: empty-domain revival, upper bound, lower
/// bound, connectivity, relaxed lower bound. Throws RepairError when the
/// migration budget (10 N) runs out.
DomainPartition repair(const DomainPartition& part, const SatGraph& g, const SizeBounds& bounds);

/// Index of the front member with the best equal-weight min-max score.
std::size_t select_final_index(std::span<const Individual> front);
DomainPartition select_final(std::span<const Individual> front);

struct GenerationStats {
  int generation = 0;
  double best_idtr = 0.0;
  double best_sigma_l = 0.0;
  int front_size = 0;
};

struct Nsga2Result {
  std::vector<Individual> front;  // rank-0 individuals, distinct label vectors
  DomainPartition selected;
  Objectives selected_obj;
  std::vector<GenerationStats> history;  // entry 0 is the initial population
};

using GenerationObserver = std::function<void(int generation, std::span<const Individual> population)>;

Nsga2Result run_nsga2(const SatGraph& g, const TrafficMatrix& t, int num_domains, const Nsga2Config& cfg,
                      std::uint64_t seed, const GenerationObserver& observer = {});

}  // namespace dtar
