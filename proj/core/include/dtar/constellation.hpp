#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace dtar {

enum class WalkerPattern { kStar, kDelta };

struct ConstellationConfig {
  int num_planes = 6;
  int sats_per_plane = 8;
  double altitude_km = 1450.0;
  double inclination_deg = 89.0;
  int phasing_factor = 1;
  double earth_radius_km = 6371.0;
  double mu_km3_s2 = 398600.4418;
  WalkerPattern pattern = WalkerPattern::kStar;

  int num_sats() const { return num_planes * sats_per_plane; }
  double orbit_radius_km() const { return earth_radius_km + altitude_km; }

  /// Throws std::invalid_argument when the torus cannot be built.
  void validate() const;
};

struct SatNode {
  int plane = 0;
  int slot = 0;
  double phase0_rad = 0.0;  // in-plane argument of latitude at t = 0
  double raan_rad = 0.0;
};

/// Satellite-level ISL graph. Immutable after build_walker().
class SatGraph {
 public:
  SatGraph() = default;
  SatGraph(int num_planes, int sats_per_plane, std::vector<SatNode> nodes,
           std::vector<std::vector<int>> adjacency);

  int size() const { return static_cast<int>(nodes_.size()); }
  int num_planes() const { return num_planes_; }
  int sats_per_plane() const { return sats_per_plane_; }
  int index_of(int plane, int slot) const { return plane * sats_per_plane_ + slot; }

  const SatNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<SatNode>& nodes() const { return nodes_; }
  /// Distinct neighbors, sorted ascending.
  const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  /// Effective degree after duplicate collapse (3 on a two-plane torus).
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  /// Undirected edges with first < second, lexicographically sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  bool has_edge(int i, int j) const;
  bool connected() const;

 private:
  int num_planes_ = 0;
  int sats_per_plane_ = 0;
  std::vector<SatNode> nodes_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::pair<int, int>> edges_;
};

/// Sub-satellite points at one time step.
struct GroundTrack {
  std::vector<double> lat_deg;
  std::vector<double> lon_deg;  // wrapped to [-180, 180)
};

SatGraph build_walker(const ConstellationConfig& cfg);

/// Circular-orbit propagation of every node to t = t_step * step_seconds.
GroundTrack ground_track(const SatGraph& g, const ConstellationConfig& cfg, int t_step,
                         double step_seconds);

/// Mean ISL propagation delay: equal-weight average of the intra-plane chord
/// and the equatorial inter-plane chord, divided by c.
double per_hop_delay_ms(const ConstellationConfig& cfg);

/// Edge-list export: header `# N P S`, then one `i j` pair per line.
void write_edge_list(std::ostream& os, const SatGraph& g);

constexpr double kSpeedOfLightKmS = 299792.458;
constexpr double kEarthRotationRadS = 7.2921159e-5;

}  // namespace dtar
