#pragma once

#include <iosfwd>
#include <vector>

#include "dtar/constellation.hpp"
#include "dtar/domain_graph.hpp"
#include "dtar/partition.hpp"
#include "dtar/rng.hpp"

namespace dtar {

/// Terrestrial demand centre shaping the node weights.
struct TrafficHotspot {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double amplitude = 10.0;
  double sigma_deg = 15.0;
};

struct TrafficConfig {
  std::vector<TrafficHotspot> hotspots;
  double base_intensity = 1.0;
  double total_volume = 1000.0;
  double diurnal_peak_hour = 20.0;
  double surge_multiplier = 5.0;
  double noise = 0.1;           // eta: multiplicative Uniform(-1, 1) jitter
  double step_seconds = 600.0;

  /// Five major-city hotspots with A_h = 10 * base and sigma = 15 deg.
  static TrafficConfig defaults();
  void validate() const;
};

/// Dense N x N demand matrix, row = source.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  explicit TrafficMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

  int size() const { return n_; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  const std::vector<double>& data() const { return data_; }

  double total() const;
  double row_sum(int i) const;
  double col_sum(int j) const;
  /// Row sum plus column sum per node; a domain load is the sum over its members.
  std::vector<double> node_loads() const;

  TrafficMatrix& operator+=(const TrafficMatrix& other);
  TrafficMatrix& operator*=(double s);

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// Surge hotspot: one inter-domain edge and the satellites of both endpoint domains.
struct SurgeHotspot {
  int edge = -1;
  int domain_a = -1;
  int domain_b = -1;
  std::vector<int> affected;  // sorted satellite ids
};

/// Local solar hour at longitude lon_deg after t_step steps.
double local_hour(double lon_deg, int t_step, double step_seconds);

/// Diurnal modulation 0.5 + 0.5 cos(2 pi (hour - peak) / 24).
double diurnal_factor(double hour, double peak_hour);

/// Great-circle angular distance in degrees.
double great_circle_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

/// Per-node gravity weights w_i at one time step.
std::vector<double> node_weights(const TrafficConfig& cfg, const GroundTrack& tracks, int t_step);

TrafficMatrix generate_traffic(const TrafficConfig& cfg, const GroundTrack& tracks, int t_step, Rng& rng);

/// Entries touching the affected set are multiplied by mu; no renormalisation.
TrafficMatrix apply_surge(const TrafficMatrix& t, const SurgeHotspot& hotspot, double mu);

/// L_k: outgoing plus incoming traffic of every member of domain k.
double domain_load(const TrafficMatrix& t, const DomainPartition& part, int k);
std::vector<double> domain_loads(const TrafficMatrix& t, const DomainPartition& part);

/// Uniform draw over inter-domain edges. Throws on an edgeless graph.
SurgeHotspot select_hotspot(const DomainGraph& dg, Rng& rng);

/// Mean traffic matrix over `steps` consecutive steps starting at t = 0.
TrafficMatrix daily_average_traffic(const TrafficConfig& cfg, const SatGraph& g,
                                    const ConstellationConfig& ccfg, int steps, Rng& rng);

/// Dense CSV, one row per source satellite.
void write_traffic_csv(std::ostream& os, const TrafficMatrix& t);

}  // namespace dtar
