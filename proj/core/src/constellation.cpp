#include "dtar/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

namespace dtar {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_lon_deg(double lon) {
  double w = std::fmod(lon + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}
}  // namespace

void ConstellationConfig::validate() const {
  if (num_planes < 2) throw std::invalid_argument("constellation: num_planes must be >= 2");
  if (sats_per_plane < 3) throw std::invalid_argument("constellation: sats_per_plane must be >= 3");
  if (!(altitude_km > 0.0)) throw std::invalid_argument("constellation: altitude_km must be > 0");
  if (!(inclination_deg > 0.0 && inclination_deg < 180.0))
    throw std::invalid_argument("constellation: inclination_deg must be in (0, 180)");
  if (phasing_factor < 0) throw std::invalid_argument("constellation: phasing_factor must be >= 0");
  if (!(earth_radius_km > 0.0)) throw std::invalid_argument("constellation: earth_radius_km must be > 0");
  if (!(mu_km3_s2 > 0.0)) throw std::invalid_argument("constellation: mu must be > 0");
}

SatGraph::SatGraph(int num_planes, int sats_per_plane, std::vector<SatNode> nodes,
                   std::vector<std::vector<int>> adjacency)
    : num_planes_(num_planes),
      sats_per_plane_(sats_per_plane),
      nodes_(std::move(nodes)),
      adjacency_(std::move(adjacency)) {
  for (int i = 0; i < size(); ++i) {
    auto& nb = adjacency_[static_cast<std::size_t>(i)];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (int j : nb) {
      if (i < j) edges_.emplace_back(i, j);
    }
  }
  std::sort(edges_.begin(), edges_.end());
}

bool SatGraph::has_edge(int i, int j) const {
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

bool SatGraph::connected() const {
  if (size() == 0) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : neighbors(u)) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == size();
}

SatGraph build_walker(const ConstellationConfig& cfg) {
  cfg.validate();
  const int P = cfg.num_planes;
  const int S = cfg.sats_per_plane;
  const int N = P * S;
  const double raan_spacing = cfg.pattern == WalkerPattern::kStar ? kPi / P : 2.0 * kPi / P;

  std::vector<SatNode> nodes(static_cast<std::size_t>(N));
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(N));
  for (int p = 0; p < P; ++p) {
    for (int s = 0; s < S; ++s) {
      const int i = p * S + s;
      auto& node = nodes[static_cast<std::size_t>(i)];
      node.plane = p;
      node.slot = s;
      node.raan_rad = p * raan_spacing;
      node.phase0_rad = 2.0 * kPi * s / S + 2.0 * kPi * cfg.phasing_factor * p / N;

      auto& nb = adjacency[static_cast<std::size_t>(i)];
      nb.push_back(p * S + (s + 1) % S);
      nb.push_back(p * S + (s + S - 1) % S);
      nb.push_back(((p + 1) % P) * S + s);
      nb.push_back(((p + P - 1) % P) * S + s);
    }
  }
  return SatGraph(P, S, std::move(nodes), std::move(adjacency));
}

GroundTrack ground_track(const SatGraph& g, const ConstellationConfig& cfg, int t_step,
                         double step_seconds) {
  const double r = cfg.orbit_radius_km();
  const double omega = std::sqrt(cfg.mu_km3_s2 / (r * r * r));
  const double t = static_cast<double>(t_step) * step_seconds;
  const double inc = cfg.inclination_deg * kPi / 180.0;
  const double ci = std::cos(inc);
  const double si = std::sin(inc);

  GroundTrack out;
  out.lat_deg.resize(static_cast<std::size_t>(g.size()));
  out.lon_deg.resize(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    const SatNode& n = g.node(i);
    const double u = n.phase0_rad + omega * t;
    const double lat = std::asin(std::clamp(si * std::sin(u), -1.0, 1.0));
    const double lon = n.raan_rad + std::atan2(ci * std::sin(u), std::cos(u)) - kEarthRotationRadS * t;
    out.lat_deg[static_cast<std::size_t>(i)] = lat * 180.0 / kPi;
    out.lon_deg[static_cast<std::size_t>(i)] = wrap_lon_deg(lon * 180.0 / kPi);
  }
  return out;
}

double per_hop_delay_ms(const ConstellationConfig& cfg) {
  const double r = cfg.orbit_radius_km();
  const double intra = 2.0 * r * std::sin(kPi / cfg.sats_per_plane);
  const double inter = 2.0 * r * std::sin(kPi / (2.0 * cfg.num_planes));
  const double mean_km = 0.5 * (intra + inter);
  return mean_km / kSpeedOfLightKmS * 1000.0;
}

void write_edge_list(std::ostream& os, const SatGraph& g) {
  os << "# " << g.size() << ' ' << g.num_planes() << ' ' << g.sats_per_plane() << '\n';
  for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

}  // namespace dtar
