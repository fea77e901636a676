#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "dtar/constellation.hpp"
#include "dtar/domain_graph.hpp"
#include "dtar/faults.hpp"
#include "dtar/partition.hpp"
#include "dtar/rng.hpp"
#include "dtar/traffic.hpp"
#include "support.hpp"

using namespace dtar;

namespace {

ConstellationConfig walker(int p, int s) {
  ConstellationConfig c;
  c.num_planes = p;
  c.sats_per_plane = s;
  return c;
}

}  // namespace

TEST(Rng, DerivedStreamsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
  Rng r = make_rng(5, Stream::kTraffic);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(r);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const int k = uniform_int(r, -2, 2);
    ASSERT_GE(k, -2);
    ASSERT_LE(k, 2);
  }
}

TEST(Constellation, FullScaleTorus) {
  const auto g = build_walker(walker(12, 24));
  EXPECT_EQ(g.size(), 288);
  EXPECT_EQ(g.num_edges(), 576);
  for (int i = 0; i < g.size(); ++i) EXPECT_EQ(g.degree(i), 4);
  EXPECT_TRUE(g.connected());
}

TEST(Constellation, DeskScaleTorus) {
  const auto g = build_walker(walker(6, 8));
  EXPECT_EQ(g.size(), 48);
  EXPECT_EQ(g.num_edges(), 96);
  EXPECT_TRUE(g.connected());
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.degree(i), 4);
    for (int j : g.neighbors(i)) EXPECT_TRUE(g.has_edge(j, i));
  }
  // same-plane ring and same-slot cross-plane links
  EXPECT_TRUE(g.has_edge(g.index_of(0, 0), g.index_of(0, 7)));
  EXPECT_TRUE(g.has_edge(g.index_of(0, 3), g.index_of(5, 3)));
  EXPECT_FALSE(g.has_edge(g.index_of(0, 3), g.index_of(1, 4)));
}

TEST(Constellation, TwoPlaneTorusCollapsesDuplicates) {
  const auto g = build_walker(walker(2, 3));
  EXPECT_EQ(g.size(), 6);
  for (int i = 0; i < g.size(); ++i) EXPECT_EQ(g.degree(i), 3);
  EXPECT_EQ(g.num_edges(), 9);
  EXPECT_TRUE(g.connected());
}

TEST(Constellation, InvalidShapesRejected) {
  EXPECT_THROW(build_walker(walker(1, 8)), std::invalid_argument);
  EXPECT_THROW(build_walker(walker(6, 2)), std::invalid_argument);
}

TEST(Constellation, GroundTrackLatitudes) {
  auto cfg = walker(6, 8);
  const auto g = build_walker(cfg);
  const auto t0 = ground_track(g, cfg, 0, 600.0);
  EXPECT_NEAR(t0.lat_deg[0], 0.0, 1e-12);
  EXPECT_NEAR(t0.lon_deg[0], 0.0, 1e-12);
  // slot 2 of plane 0 sits at u = pi/2
  EXPECT_NEAR(t0.lat_deg[static_cast<std::size_t>(g.index_of(0, 2))], 89.0, 1e-9);
  for (int step : {0, 7, 143}) {
    const auto tr = ground_track(g, cfg, step, 600.0);
    for (std::size_t i = 0; i < tr.lat_deg.size(); ++i) {
      EXPECT_LE(std::abs(tr.lat_deg[i]), 89.0 + 1e-9);
      EXPECT_GE(tr.lon_deg[i], -180.0);
      EXPECT_LT(tr.lon_deg[i], 180.0);
    }
  }
}

TEST(Constellation, PerHopDelay) {
  const auto cfg = walker(12, 24);
  const double chord = 2.0 * 7821.0 * std::sin(std::numbers::pi / 24.0);
  EXPECT_NEAR(chord, 2041.5, 0.5);
  EXPECT_NEAR(per_hop_delay_ms(cfg), chord / kSpeedOfLightKmS * 1000.0, 1e-9);
  EXPECT_NEAR(per_hop_delay_ms(cfg), 6.81, 0.005);
  // the intra-plane part vanishes as S grows
  const double a = per_hop_delay_ms(walker(12, 200000));
  const double inter_only = 0.5 * chord / kSpeedOfLightKmS * 1000.0;
  EXPECT_NEAR(a, inter_only, 1e-3);
}

TEST(Constellation, EdgeListExport) {
  const auto g = build_walker(walker(2, 3));
  std::ostringstream os;
  write_edge_list(os, g);
  std::istringstream is(os.str());
  std::string hash;
  int n = 0, p = 0, s = 0;
  is >> hash >> n >> p >> s;
  EXPECT_EQ(hash, "#");
  EXPECT_EQ(n, 6);
  int a = 0, b = 0, count = 0;
  while (is >> a >> b) {
    EXPECT_TRUE(g.has_edge(a, b));
    ++count;
  }
  EXPECT_EQ(count, g.num_edges());
}

TEST(Traffic, EqualWeightsGiveUniformMatrix) {
  TrafficConfig cfg = TrafficConfig::defaults();
  for (auto& h : cfg.hotspots) h.amplitude = 0.0;
  cfg.noise = 0.0;
  const auto ccfg = walker(6, 8);
  const auto g = build_walker(ccfg);
  Rng rng = make_rng(1, Stream::kTraffic);
  const auto t = generate_traffic(cfg, ground_track(g, ccfg, 3, cfg.step_seconds), 3, rng);
  const double expected = cfg.total_volume / (48.0 * 47.0);
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j) EXPECT_NEAR(t(i, j), i == j ? 0.0 : expected, 1e-12);
}

TEST(Traffic, TotalVolumeConserved) {
  const TrafficConfig cfg = TrafficConfig::defaults();
  const auto ccfg = walker(6, 8);
  const auto g = build_walker(ccfg);
  Rng rng = make_rng(9, Stream::kTraffic);
  for (int step = 0; step < 144; step += 11) {
    const auto t = generate_traffic(cfg, ground_track(g, ccfg, step, cfg.step_seconds), step, rng);
    EXPECT_NEAR(t.total(), cfg.total_volume, 1e-9 * cfg.total_volume);
    for (int i = 0; i < 48; ++i) {
      EXPECT_EQ(t(i, i), 0.0);
      for (int j = 0; j < 48; ++j) EXPECT_GE(t(i, j), 0.0);
    }
  }
}

TEST(Traffic, SatelliteOverPeakingHotspotHasLargestRow) {
  TrafficConfig cfg;
  cfg.noise = 0.0;
  // hotspot at lon 0: local hour at t = 0 is 0, so put the peak there
  cfg.diurnal_peak_hour = 0.0;
  cfg.hotspots = {{10.0, 0.0, 10.0, 15.0}};
  GroundTrack tr;
  Rng pos = make_rng(3, 99);
  for (int i = 0; i < 20; ++i) {
    tr.lat_deg.push_back(-80.0 + 160.0 * uniform01(pos));
    tr.lon_deg.push_back(-180.0 + 360.0 * uniform01(pos));
  }
  tr.lat_deg[13] = 10.0;
  tr.lon_deg[13] = 0.0;
  Rng rng = make_rng(1, 1);
  const auto t = generate_traffic(cfg, tr, 0, rng);
  const auto w = node_weights(cfg, tr, 0);
  int best_w = 0;
  int best_row = 0;
  for (int i = 0; i < 20; ++i) {
    // brute-force weight
    const double d = great_circle_deg(tr.lat_deg[i], tr.lon_deg[i], 10.0, 0.0);
    EXPECT_NEAR(w[i], 1.0 + 10.0 * std::exp(-d * d / (2.0 * 225.0)), 1e-12);
    if (w[i] > w[best_w]) best_w = i;
    if (t.row_sum(i) > t.row_sum(best_row)) best_row = i;
  }
  EXPECT_EQ(best_w, 13);
  EXPECT_EQ(best_row, 13);
}

TEST(Traffic, DiurnalAndGeometryHelpers) {
  EXPECT_DOUBLE_EQ(diurnal_factor(20.0, 20.0), 1.0);
  EXPECT_NEAR(diurnal_factor(8.0, 20.0), 0.0, 1e-12);
  EXPECT_NEAR(local_hour(0.0, 6, 600.0), 1.0, 1e-12);
  EXPECT_NEAR(local_hour(-30.0, 0, 600.0), 22.0, 1e-12);
  EXPECT_NEAR(great_circle_deg(0, 0, 0, 90), 90.0, 1e-9);
  EXPECT_NEAR(great_circle_deg(0, 0, 90, 0), 90.0, 1e-9);
  EXPECT_NEAR(great_circle_deg(10, 20, 10, 20), 0.0, 1e-12);
}

TEST(Traffic, SurgeMatchesBruteForce) {
  const TrafficConfig cfg = TrafficConfig::defaults();
  const auto ccfg = walker(6, 8);
  const auto g = build_walker(ccfg);
  Rng rng = make_rng(4, Stream::kTraffic);
  const auto t = generate_traffic(cfg, ground_track(g, ccfg, 0, cfg.step_seconds), 0, rng);

  SurgeHotspot identity_hot;
  identity_hot.affected = {0, 5, 9};
  const auto same = apply_surge(t, identity_hot, 1.0);
  EXPECT_EQ(same.data(), t.data());

  SurgeHotspot all;
  for (int i = 0; i < 48; ++i) all.affected.push_back(i);
  const auto scaled = apply_surge(t, all, 5.0);
  for (std::size_t k = 0; k < t.data().size(); ++k) EXPECT_DOUBLE_EQ(scaled.data()[k], 5.0 * t.data()[k]);

  SurgeHotspot one;
  one.affected = {0};
  const auto s0 = apply_surge(t, one, 5.0);
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j) {
      const double expect = (i == 0 || j == 0) ? 5.0 * t(i, j) : t(i, j);
      EXPECT_DOUBLE_EQ(s0(i, j), expect);
    }
}

TEST(Traffic, DomainLoads) {
  TrafficMatrix t(4);
  t(0, 2) = 3.0;
  t(3, 1) = 2.0;
  const DomainPartition part(2, {0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(domain_load(t, part, 0), 5.0);
  EXPECT_DOUBLE_EQ(domain_load(t, part, 1), 5.0);
  const auto loads = domain_loads(t, part);
  EXPECT_DOUBLE_EQ(loads[0], 5.0);
  EXPECT_DOUBLE_EQ(loads[1], 5.0);

  const DomainPartition single(1, {0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(domain_load(t, single, 0), 2.0 * t.total());
  EXPECT_DOUBLE_EQ(domain_load(TrafficMatrix(4), part, 1), 0.0);
}

TEST(Traffic, HotspotSelectionIsUniform) {
  const auto dg = fixture::small_domain_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  Rng rng = make_rng(2, Stream::kSurge);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 10000; ++i) ++counts[static_cast<std::size_t>(select_hotspot(dg, rng).edge)];
  for (int c : counts) {
    EXPECT_GE(c / 10000.0, 0.30);
    EXPECT_LE(c / 10000.0, 0.37);
  }
  const auto single = fixture::small_domain_graph(2, {{0, 1}});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_hotspot(single, rng).edge, 0);
  EXPECT_THROW(select_hotspot(fixture::small_domain_graph(1, {}), rng), std::invalid_argument);
}

TEST(Traffic, HotspotAffectsBothEndpointDomains) {
  const auto ccfg = walker(6, 8);
  const auto g = build_walker(ccfg);
  const auto part = uniform_partition(48, 6);
  const auto dg = build_domain_graph(part, g);
  Rng rng = make_rng(11, Stream::kSurge);
  for (int i = 0; i < 50; ++i) {
    const auto h = select_hotspot(dg, rng);
    EXPECT_EQ(static_cast<int>(h.affected.size()), dg.domain_size(h.domain_a) + dg.domain_size(h.domain_b));
    for (int s : h.affected) EXPECT_TRUE(part.label(s) == h.domain_a || part.label(s) == h.domain_b);
  }
}

TEST(Faults, FullRecoveryClearsEverything) {
  const auto dg = fixture::small_domain_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
  FaultState s = FaultState::healthy(dg);
  s.set_failed(1, true);
  s.set_failed(4, true);
  Rng rng = make_rng(1, Stream::kFaults);
  const auto next = step_faults(s, {0.0, 1.0}, dg, rng);
  EXPECT_EQ(next.num_failed(), 0);
}

TEST(Faults, TreeNeverFails) {
  const auto dg = fixture::small_domain_graph(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
  Rng rng = make_rng(1, Stream::kFaults);
  FaultState s = FaultState::healthy(dg);
  for (int i = 0; i < 20; ++i) {
    s = step_faults(s, {1.0, 0.0}, dg, rng);
    EXPECT_EQ(s.num_failed(), 0);
  }
}

TEST(Faults, CycleLosesExactlyOneEdgeMatchingBridgeOracle) {
  const auto dg = fixture::small_domain_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  Rng rng = make_rng(3, Stream::kFaults);
  const auto healthy = FaultState::healthy(dg);
  const auto next = step_faults(healthy, {1.0, 0.0}, dg, rng);
  EXPECT_EQ(next.num_failed(), 1);

  // sequential oracle: fail each edge in id order unless it is a bridge
  FaultState oracle = healthy;
  for (int e = 0; e < dg.num_edges(); ++e) {
    const auto bridges = fixture::brute_force_bridges(dg, oracle);
    if (std::find(bridges.begin(), bridges.end(), e) == bridges.end()) oracle.set_failed(e, true);
  }
  EXPECT_EQ(next, oracle);
  EXPECT_TRUE(next.failed(0));
}

TEST(Faults, RandomGraphsFollowBridgeOracle) {
  Rng gen = make_rng(17, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = uniform_int(gen, 2, 9);
    const auto dg = fixture::small_domain_graph(k, fixture::random_connected_edges(k, 0.4, gen));
    FaultState s = FaultState::healthy(dg);
    for (int e = 0; e < dg.num_edges(); ++e)
      if (uniform01(gen) < 0.3) {
        s.set_failed(e, true);
        if (!operational_connected(dg, s)) s.set_failed(e, false);
      }
    const FaultConfig cfg{0.6, 0.3};
    const std::uint64_t seed = static_cast<std::uint64_t>(trial);
    Rng r1 = make_rng(seed, Stream::kFaults);
    const auto next = step_faults(s, cfg, dg, r1);

    // replay the same draws by hand
    Rng r2 = make_rng(seed, Stream::kFaults);
    std::vector<double> u(static_cast<std::size_t>(dg.num_edges()));
    for (auto& x : u) x = uniform01(r2);
    FaultState oracle = s;
    for (int e = 0; e < dg.num_edges(); ++e)
      if (s.failed(e) && u[e] < cfg.recover_prob) oracle.set_failed(e, false);
    for (int e = 0; e < dg.num_edges(); ++e) {
      if (s.failed(e) || !(u[e] < cfg.fail_prob)) continue;
      const auto bridges = fixture::brute_force_bridges(dg, oracle);
      if (std::find(bridges.begin(), bridges.end(), e) == bridges.end()) oracle.set_failed(e, true);
    }
    ASSERT_EQ(next, oracle) << "trial " << trial;
    ASSERT_TRUE(operational_connected(dg, next));
  }
}

TEST(Faults, OperationalFlag) {
  const auto dg = fixture::small_domain_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  FaultState s = FaultState::healthy(dg);
  for (const auto& e : dg.edges()) EXPECT_TRUE(s.is_operational(dg, e.a, e.b));
  const int id = dg.edge_id(2, 1);
  s.set_failed(id, true);
  EXPECT_FALSE(s.is_operational(dg, 1, 2));
  EXPECT_DOUBLE_EQ(s.available_ratio(id), 0.0);
  s.set_failed(id, false);
  EXPECT_TRUE(s.is_operational(dg, 2, 1));
  EXPECT_THROW(s.is_operational(fixture::small_domain_graph(3, {{0, 1}, {1, 2}}), 0, 2), std::invalid_argument);
}

TEST(Faults, HighFailureRateKeepsConnectivity) {
  const auto ccfg = walker(6, 8);
  const auto g = build_walker(ccfg);
  const auto dg = build_domain_graph(uniform_partition(48, 6), g);
  Rng rng = make_rng(5, Stream::kFaults);
  FaultState s = FaultState::healthy(dg);
  int max_failed = 0;
  for (int step = 0; step < 2000; ++step) {
    s = step_faults(s, {0.5, 0.02}, dg, rng);
    ASSERT_TRUE(operational_connected(dg, s));
    max_failed = std::max(max_failed, s.num_failed());
  }
  EXPECT_GT(max_failed, 0);
}
