#include "dtar/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace dtar {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TrafficConfig TrafficConfig::defaults() {
  TrafficConfig cfg;
  const double a = 10.0 * cfg.base_intensity;
  cfg.hotspots = {
      {40.7, -74.0, a, 15.0},   // New York
      {51.5, -0.1, a, 15.0},    // London
      {39.9, 116.4, a, 15.0},   // Beijing
      {35.7, 139.7, a, 15.0},   // Tokyo
      {-23.5, -46.6, a, 15.0},  // Sao Paulo
  };
  return cfg;
}

void TrafficConfig::validate() const {
  if (hotspots.empty()) throw std::invalid_argument("traffic: at least one hotspot required");
  for (const auto& h : hotspots) {
    if (!(h.sigma_deg > 0.0)) throw std::invalid_argument("traffic: hotspot sigma must be > 0");
    if (h.amplitude < 0.0) throw std::invalid_argument("traffic: hotspot amplitude must be >= 0");
  }
  if (!(base_intensity > 0.0)) throw std::invalid_argument("traffic: base_intensity must be > 0");
  if (!(total_volume > 0.0)) throw std::invalid_argument("traffic: total_volume must be > 0");
  if (!(diurnal_peak_hour >= 0.0 && diurnal_peak_hour < 24.0))
    throw std::invalid_argument("traffic: diurnal_peak_hour must be in [0, 24)");
  if (!(surge_multiplier >= 1.0)) throw std::invalid_argument("traffic: surge_multiplier must be >= 1");
  if (!(noise >= 0.0 && noise < 1.0)) throw std::invalid_argument("traffic: noise must be in [0, 1)");
  if (!(step_seconds > 0.0)) throw std::invalid_argument("traffic: step_seconds must be > 0");
}

double TrafficMatrix::total() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double TrafficMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double TrafficMatrix::col_sum(int j) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

std::vector<double> TrafficMatrix::node_loads() const {
  std::vector<double> loads(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      loads[static_cast<std::size_t>(i)] += v;
      loads[static_cast<std::size_t>(j)] += v;
    }
  }
  return loads;
}

TrafficMatrix& TrafficMatrix::operator+=(const TrafficMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("TrafficMatrix: size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

TrafficMatrix& TrafficMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double local_hour(double lon_deg, int t_step, double step_seconds) {
  const double h = static_cast<double>(t_step) * step_seconds / 3600.0 + lon_deg / 15.0;
  double w = std::fmod(h, 24.0);
  if (w < 0.0) w += 24.0;
  return w;
}

double diurnal_factor(double hour, double peak_hour) {
  return 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
}

double great_circle_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
  const double p1 = lat1_deg * kDeg;
  const double p2 = lat2_deg * kDeg;
  const double dl = (lon2_deg - lon1_deg) * kDeg;
  // haversine keeps precision at small separations
  const double s1 = std::sin((p2 - p1) / 2.0);
  const double s2 = std::sin(dl / 2.0);
  const double a = s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2;
  return 2.0 * std::asin(std::min(1.0, std::sqrt(a))) / kDeg;
}

std::vector<double> node_weights(const TrafficConfig& cfg, const GroundTrack& tracks, int t_step) {
  const std::size_t n = tracks.lat_deg.size();
  std::vector<double> diurnal;
  diurnal.reserve(cfg.hotspots.size());
  for (const auto& h : cfg.hotspots) {
    diurnal.push_back(diurnal_factor(local_hour(h.lon_deg, t_step, cfg.step_seconds), cfg.diurnal_peak_hour));
  }
  std::vector<double> w(n, cfg.base_intensity);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < cfg.hotspots.size(); ++h) {
      const auto& hs = cfg.hotspots[h];
      const double d = great_circle_deg(tracks.lat_deg[i], tracks.lon_deg[i], hs.lat_deg, hs.lon_deg);
      w[i] += hs.amplitude * std::exp(-d * d / (2.0 * hs.sigma_deg * hs.sigma_deg)) * diurnal[h];
    }
  }
  return w;
}

TrafficMatrix generate_traffic(const TrafficConfig& cfg, const GroundTrack& tracks, int t_step, Rng& rng) {
  const int n = static_cast<int>(tracks.lat_deg.size());
  if (n < 2) throw std::invalid_argument("generate_traffic: need at least two satellites");
  const auto w = node_weights(cfg, tracks, t_step);

  double wsum = 0.0;
  double wsq = 0.0;
  for (double x : w) {
    wsum += x;
    wsq += x * x;
  }
  const double pair_mass = wsum * wsum - wsq;  // sum over a != b of w_a w_b

  TrafficMatrix t(n);
  if (!(pair_mass > 0.0)) {
    const double u = cfg.total_volume / (static_cast<double>(n) * (n - 1));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) t(i, j) = u;
    return t;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      t(i, j) = cfg.total_volume * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] / pair_mass;
    }
  }
  if (cfg.noise > 0.0) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        t(i, j) *= 1.0 + cfg.noise * (2.0 * uniform01(rng) - 1.0);
      }
    }
    t *= cfg.total_volume / t.total();
  }
  return t;
}

TrafficMatrix apply_surge(const TrafficMatrix& t, const SurgeHotspot& hotspot, double mu) {
  if (mu < 1.0) throw std::invalid_argument("apply_surge: mu must be >= 1");
  TrafficMatrix out = t;
  if (hotspot.affected.empty()) return out;
  const int n = t.size();
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (int s : hotspot.affected) hit[static_cast<std::size_t>(s)] = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (hit[static_cast<std::size_t>(i)] || hit[static_cast<std::size_t>(j)]) out(i, j) *= mu;
    }
  }
  return out;
}

double domain_load(const TrafficMatrix& t, const DomainPartition& part, int k) {
  double load = 0.0;
  const int n = t.size();
  for (int i = 0; i < n; ++i) {
    if (part.label(i) != k) continue;
    load += t.row_sum(i) + t.col_sum(i);
  }
  return load;
}

std::vector<double> domain_loads(const TrafficMatrix& t, const DomainPartition& part) {
  std::vector<double> loads(static_cast<std::size_t>(part.num_domains()), 0.0);
  const auto node = t.node_loads();
  for (int i = 0; i < t.size(); ++i) loads[static_cast<std::size_t>(part.label(i))] += node[static_cast<std::size_t>(i)];
  return loads;
}

SurgeHotspot select_hotspot(const DomainGraph& dg, Rng& rng) {
  if (dg.num_edges() == 0) throw std::invalid_argument("select_hotspot: domain graph has no edges");
  SurgeHotspot h;
  h.edge = uniform_int(rng, 0, dg.num_edges() - 1);
  const auto& e = dg.edge(h.edge);
  h.domain_a = e.a;
  h.domain_b = e.b;
  h.affected = dg.members(e.a);
  h.affected.insert(h.affected.end(), dg.members(e.b).begin(), dg.members(e.b).end());
  std::sort(h.affected.begin(), h.affected.end());
  return h;
}

TrafficMatrix daily_average_traffic(const TrafficConfig& cfg, const SatGraph& g,
                                    const ConstellationConfig& ccfg, int steps, Rng& rng) {
  if (steps < 1) throw std::invalid_argument("daily_average_traffic: steps must be >= 1");
  TrafficMatrix acc(g.size());
  for (int t = 0; t < steps; ++t) {
    const auto tracks = ground_track(g, ccfg, t, cfg.step_seconds);
    acc += generate_traffic(cfg, tracks, t, rng);
  }
  acc *= 1.0 / steps;
  return acc;
}

void write_traffic_csv(std::ostream& os, const TrafficMatrix& t) {
  const auto prec = os.precision(17);
  for (int i = 0; i < t.size(); ++i) {
    for (int j = 0; j < t.size(); ++j) {
      if (j) os << ',';
      os << t(i, j);
    }
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace dtar
