// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtar/agents/dtar_agent.hpp"
#include "dtar/harness/cli.hpp"
#include "dtar/harness/config.hpp"
#include "dtar/harness/evaluate.hpp"
#include "dtar/harness/train.hpp"
#include "dtar/partitioner.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace dtar;
using namespace dtar::harness;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string report_line(int id, const std::string& name, const Verdict& v, double secs) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-22s (%.1fs) ", v.pass ? "PASS" : "FAIL", id, name.c_str(), secs);
  return head + v.detail;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- 1

Verdict partition_validity(const ExperimentConfig& cfg) {
  const SatGraph g = build_walker(cfg.constellation);
  const int k = cfg.partition.num_domains;
  const SizeBounds b = cfg.partition.nsga2.effective_bounds(g.size(), k);
  Rng rng = make_rng(2024, 1);
  int ok = 0;
  std::string first_bad;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> labels(static_cast<std::size_t>(g.size()));
    for (auto& l : labels) l = uniform_int(rng, 0, k - 1);
    try {
      const PartitionCheck c = check_partition(repair(DomainPartition(k, labels), g, b), g, b);
      if (c.ok()) {
        ++ok;
      } else if (first_bad.empty()) {
        first_bad = c.describe();
      }
    } catch (const RepairError& e) {
      if (first_bad.empty()) first_bad = e.what();
    }
  }
  return {ok == 1000, std::to_string(ok) + "/1000 valid" + (first_bad.empty() ? "" : ", first failure: " + first_bad)};
}

// ---------------------------------------------------------------- 2

struct SeedPartition {
  std::uint64_t seed = 0;
  Nsga2Result result;
  Objectives uniform;
};

Verdict nsga_dominance(const ExperimentConfig& cfg, std::vector<SeedPartition>& runs) {
  const SatGraph g = build_walker(cfg.constellation);
  const int k = cfg.partition.num_domains;
  const DomainPartition uni = repair(uniform_partition(g.size(), k), g, cfg.partition.nsga2.effective_bounds(g.size(), k));
  int idtr_ok = 0, both = 0, not_dominated = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SeedPartition sp;
    sp.seed = seed;
    sp.result = compute_partition(cfg, seed);
    const TrafficMatrix t = partition_traffic(cfg, g, seed);
    sp.uniform = {idtr(uni, t), load_deviation(uni, t)};
    const Objectives& s = sp.result.selected_obj;
    const bool i_ok = s.idtr >= sp.uniform.idtr;
    const bool s_ok = s.sigma_l <= sp.uniform.sigma_l;
    idtr_ok += i_ok;
    both += i_ok && s_ok;
    not_dominated += !dominates(sp.uniform, s);
    per_seed << " s" << seed << "(" << fmt("%.3f", s.idtr) << "/" << fmt("%.3f", sp.uniform.idtr) << ","
             << fmt("%.1f", s.sigma_l) << "/" << fmt("%.1f", sp.uniform.sigma_l) << ")";
    runs.push_back(std::move(sp));
  }
  std::ostringstream d;
  d << "IDTR>=uniform " << idtr_ok << "/10, IDTR and sigma_L both " << both << "/10, not dominated by uniform "
    << not_dominated << "/10;" << per_seed.str();
  return {both >= 8 && not_dominated == 10, d.str()};
}

// ---------------------------------------------------------------- 3

std::vector<std::vector<int>> brute_fronts(const std::vector<Objectives>& objs) {
  std::vector<int> rank(objs.size(), -1);
  std::vector<std::vector<int>> fronts;
  std::size_t assigned = 0;
  while (assigned < objs.size()) {
    std::vector<int> f;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (rank[i] >= 0) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < objs.size() && !dominated; ++j)
        if (j != i && rank[j] < 0 && dominates(objs[j], objs[i])) dominated = true;
      if (!dominated) f.push_back(static_cast<int>(i));
    }
    for (int i : f) rank[static_cast<std::size_t>(i)] = static_cast<int>(fronts.size());
    assigned += f.size();
    fronts.push_back(f);
  }
  return fronts;
}

Verdict oracle_equivalence() {
  Rng rng = make_rng(77, 3);
  int sort_bad = 0, hop_bad = 0, cv_bad = 0, gae_bad = 0;

  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 1, 60);
    std::vector<Objectives> objs(static_cast<std::size_t>(n));
    for (auto& o : objs) {
      // coarse grid so ties and duplicates occur
      o.idtr = uniform_int(rng, 0, 9) / 10.0;
      o.sigma_l = uniform_int(rng, 0, 9);
    }
    auto fast = nondominated_sort(objs);
    auto slow = brute_fronts(objs);
    for (auto& f : fast) std::sort(f.begin(), f.end());
    if (fast != slow) ++sort_bad;
  }

  for (int trial = 0; trial < 100; ++trial) {
    const int k = uniform_int(rng, 2, 10);
    const DomainGraph dg = fixture::small_domain_graph(k, fixture::random_connected_edges(k, 0.3, rng));
    FaultState f = FaultState::healthy(dg);
    for (int e = 0; e < dg.num_edges(); ++e) f.set_failed(e, uniform01(rng) < 0.25);
    const auto fw = fixture::floyd_warshall(dg, f);
    for (int dst = 0; dst < k; ++dst) {
      const auto d = hop_distances(dg, f, dst);
      for (int v = 0; v < k; ++v) {
        const int want = fw[static_cast<std::size_t>(v)][static_cast<std::size_t>(dst)];
        const int got = d[static_cast<std::size_t>(v)];
        if ((want >= fixture::kInf) ? got != kUnreachable : got != want) ++hop_bad;
      }
    }
  }

  for (int trial = 0; trial < 100; ++trial) {
    const int m = uniform_int(rng, 1, 40);
    LinkLoadState s;
    for (int i = 0; i < m; ++i) s.load.push_back(uniform01(rng) < 0.1 ? 0.0 : 100.0 * uniform01(rng));
    double mu = 0.0;
    for (double x : s.load) mu += x;
    mu /= m;
    double var = 0.0;
    for (double x : s.load) var += (x - mu) * (x - mu);
    const double want = mu == 0.0 ? 0.0 : std::sqrt(var / m) / mu;
    const double got = cv(s);
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) ++cv_bad;
  }

  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 1, 50);
    const double gamma = uniform01(rng), lambda = uniform01(rng), last = uniform01(rng);
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    std::unique_ptr<bool[]> d(new bool[static_cast<std::size_t>(n)]);
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = 2.0 * uniform01(rng) - 1.0;
      v[static_cast<std::size_t>(i)] = 2.0 * uniform01(rng) - 1.0;
      d[static_cast<std::size_t>(i)] = uniform01(rng) < 0.2;
    }
    const auto got = agents::gae(r, v, std::span<const bool>(d.get(), static_cast<std::size_t>(n)), last, gamma, lambda);
    double a_next = 0.0;
    for (int t = n - 1; t >= 0; --t) {
      const auto i = static_cast<std::size_t>(t);
      const double cont = d[i] ? 0.0 : 1.0;
      const double v_next = t + 1 < n ? v[i + 1] : last;
      const double delta = r[i] + gamma * v_next * cont - v[i];
      const double a = delta + gamma * lambda * cont * a_next;
      if (std::abs(got.advantages[i] - a) > 1e-12 || std::abs(got.returns[i] - (a + v[i])) > 1e-12) ++gae_bad;
      a_next = a;
    }
  }
  std::ostringstream d;
  d << "mismatches: sort " << sort_bad << ", hop " << hop_bad << ", cv " << cv_bad << ", gae " << gae_bad;
  return {sort_bad + hop_bad + cv_bad + gae_bad == 0, d.str()};
}

// ---------------------------------------------------------------- 4

Verdict gradient_correctness(int k) {
  double worst = 0.0;
  std::size_t checked = 0;
  std::string where;
  for (int point = 0; point < 5; ++point) {
    Rng rng = make_rng(500 + static_cast<std::uint64_t>(point), 4);
    agents::ActorCritic net(k, agents::EncoderKind::kGat, rng);
    const auto buf = fixture::random_buffer(net, k, 4, rng);
    std::vector<double> adv(4);
    for (auto& a : adv) a = 2.0 * uniform01(rng) - 1.0;
    std::vector<int> idx(4);
    std::iota(idx.begin(), idx.end(), 0);
    const agents::PpoConfig cfg;
    const auto r = fixture::gradcheck(net.parameters(), [&] { return agents::ppo_loss(net, buf, idx, adv, cfg); });
    checked += r.checked;
    if (r.max_rel > worst) {
      worst = r.max_rel;
      where = r.worst;
    }
  }
  std::ostringstream d;
  d << "max relative error " << fmt("%.2e", worst) << " over " << checked << " entries at 5 points";
  if (!where.empty()) d << " (worst " << where << ")";
  return {worst < 1e-4, d.str()};
}

// ---------------------------------------------------------------- 6

Verdict fault_connectivity(const World& world) {
  FaultConfig fc;
  fc.fail_prob = 0.5;
  Rng rng = make_rng(606, 6);
  FaultState f = FaultState::healthy(world.dg);
  int bad = 0, max_failed = 0;
  for (int t = 0; t < 10000; ++t) {
    f = step_faults(f, fc, world.dg, rng);
    if (!operational_connected(world.dg, f)) ++bad;
    max_failed = std::max(max_failed, f.num_failed());
  }
  std::ostringstream d;
  d << bad << " disconnected steps of 10000 on a " << world.dg.num_domains() << "-domain graph with "
    << world.dg.num_edges() << " edges (peak " << max_failed << " failed)";
  return {bad == 0, d.str()};
}

// ---------------------------------------------------------------- 7-9

struct TrainedSeed {
  std::uint64_t seed = 0;
  std::vector<RewardPoint> curve;
  std::vector<EvalRow> rows;  // DTAR x 3 then DIJKSTRA x 3
  double train_secs = 0.0;
};

double curve_at(const std::vector<RewardPoint>& c, long long step) {
  double v = c.front().mean_reward;
  for (const auto& p : c)
    if (p.step <= step) v = p.mean_reward;
  return v;
}

const EvalRow& row_for(const std::vector<EvalRow>& rows, const std::string& agent, const std::string& scenario) {
  for (const auto& r : rows)
    if (r.metrics.agent == agent && r.metrics.scenario == scenario) return r;
  throw std::runtime_error("no row for " + agent + "/" + scenario);
}

TrainedSeed train_and_evaluate(const ExperimentConfig& cfg, const DomainPartition& part, std::uint64_t seed,
                               const fs::path& workdir) {
  TrainedSeed ts;
  ts.seed = seed;
  const World world = World::build(cfg.constellation, part);
  auto dtar = make_agent(agents::AgentKind::kDtar, cfg, seed);
  auto dij = make_agent(agents::AgentKind::kDijkstra, cfg, seed);
  TrainOptions opts;
  opts.checkpoint_path = (workdir / ("dtar_seed" + std::to_string(seed) + ".ckpt")).string();
  const auto t0 = Clock::now();
  ts.curve = train(*dtar, world, cfg, seed, opts).curve;
  ts.train_secs = seconds_since(t0);
  std::ofstream csv(workdir / ("dtar_seed" + std::to_string(seed) + "_reward_curve.csv"));
  write_reward_curve_csv(csv, ts.curve);
  ts.rows = evaluate({{dtar.get(), &world}, {dij.get(), &world}}, cfg, seed, cfg.eval.episodes_per_scenario);
  std::ofstream res(workdir / ("results_seed" + std::to_string(seed) + ".csv"));
  write_results_csv(res, ts.rows);
  return ts;
}

Verdict convergence(const std::vector<TrainedSeed>& seeds, long long early, long long late) {
  int ok = 0;
  std::ostringstream d;
  for (const auto& s : seeds) {
    double lo = s.curve.front().mean_reward, hi = lo;
    for (const auto& p : s.curve) {
      lo = std::min(lo, p.mean_reward);
      hi = std::max(hi, p.mean_reward);
    }
    const double a = curve_at(s.curve, early), b = curve_at(s.curve, late);
    const double gain = hi > lo ? (b - a) / (hi - lo) : 0.0;
    ok += gain >= 0.2;
    d << " s" << s.seed << "(" << fmt("%.3f", a) << "->" << fmt("%.3f", b) << ", range " << fmt("%.3f", hi - lo)
      << ", gain " << fmt("%.0f%%", 100.0 * gain) << ")";
  }
  return {ok == static_cast<int>(seeds.size()), std::to_string(ok) + "/" + std::to_string(seeds.size()) + " seeds;" + d.str()};
}

Verdict surge_cv(const std::vector<TrainedSeed>& seeds) {
  int ok = 0;
  std::ostringstream d;
  for (const auto& s : seeds) {
    const double a = row_for(s.rows, "DTAR", "surge").metrics.cv_mean();
    const double b = row_for(s.rows, "DIJKSTRA", "surge").metrics.cv_mean();
    ok += a < b;
    d << " s" << s.seed << "(DTAR " << fmt("%.4f", a) << " vs DIJKSTRA " << fmt("%.4f", b) << ")";
  }
  return {ok >= 2, std::to_string(ok) + "/" + std::to_string(seeds.size()) + " seeds;" + d.str()};
}

Verdict fault_sr(const std::vector<TrainedSeed>& seeds) {
  int ok = 0;
  std::ostringstream d;
  for (const auto& s : seeds) {
    const double a = row_for(s.rows, "DTAR", "fault").metrics.sr();
    const double b = row_for(s.rows, "DIJKSTRA", "fault").metrics.sr();
    ok += a - b >= 0.03;
    d << " s" << s.seed << "(DTAR " << fmt("%.4f", a) << " vs DIJKSTRA " << fmt("%.4f", b) << ", +"
      << fmt("%.2f", 100.0 * (a - b)) << "pp)";
  }
  return {ok >= 2, std::to_string(ok) + "/" + std::to_string(seeds.size()) + " seeds;" + d.str()};
}

Verdict mask_soundness(const std::vector<TrainedSeed>& seeds) {
  long long flows = 0, faulted = 0, over = 0, violations = 0;
  for (const auto& s : seeds) {
    const auto& r = row_for(s.rows, "DTAR", "fault");
    flows += r.metrics.requests;
    faulted += r.faulted_traversals;
    over += r.hop_budget_exceeded;
    violations += r.mask_violations;
  }
  std::ostringstream d;
  d << flows << " fault-scenario flows: " << faulted << " faulted traversals, " << over << " over H_max, "
    << violations << " mask violations";
  return {flows >= 10000 && faulted == 0 && over == 0 && violations == 0, d.str()};
}

// ---------------------------------------------------------------- 10, 11

int run_cli(std::vector<std::string> args, std::string* err_out = nullptr) {
  args.insert(args.begin(), "dtar");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_out) *err_out = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct IdentityTally {
  long long records = 0;
  long long bad = 0;
  void check(double sr, double plr, double delay, double hops, double per_hop) {
    ++records;
    if (sr + plr != 1.0 || delay != hops * per_hop || delay < 0.0) ++bad;
  }
};

Verdict metric_identities(const std::vector<TrainedSeed>& seeds, const std::vector<fs::path>& json_files,
                          double per_hop) {
  IdentityTally t;
  for (const auto& s : seeds)
    for (const auto& r : s.rows)
      t.check(r.metrics.sr(), r.metrics.plr(), r.metrics.delay_ms_mean(), r.metrics.hops_mean(), per_hop);
  for (const auto& p : json_files) {
    for (const auto& r : nlohmann::json::parse(slurp(p))) {
      t.check(r.at("sr").get<double>(), r.at("plr").get<double>(), r.at("delay_ms_mean").get<double>(),
              r.at("hops_mean").get<double>(), per_hop);
    }
  }
  std::ostringstream d;
  d << t.bad << " violations over " << t.records << " records";
  return {t.records > 0 && t.bad == 0, d.str()};
}

Verdict determinism(const fs::path& config, const fs::path& workdir, long long timesteps, int episodes,
                    std::vector<fs::path>& json_files) {
  const std::vector<std::string> files{"partition.json", "pareto.csv",  "dtar.ckpt",   "dtar_reward_curve.csv",
                                       "results.csv",    "results.json", "config.json"};
  for (const char* run : {"run_a", "run_b"}) {
    const fs::path out = workdir / run;
    fs::remove_all(out);
    std::vector<std::string> common{"--seed", "11", "--out", out.string()};
    if (!config.empty()) common.insert(common.begin(), {"--config", config.string()});
    auto with = [&](std::vector<std::string> tail) {
      std::vector<std::string> a = common;
      a.insert(a.end(), tail.begin(), tail.end());
      return a;
    };
    std::string err;
    if (run_cli(with({"partition"}), &err) != 0) return {false, std::string("partition failed: ") + err};
    if (run_cli(with({"train", "--agent", "DTAR", "--timesteps", std::to_string(timesteps)}), &err) != 0) {
      return {false, "train failed: " + err};
    }
    if (run_cli(with({"eval", "--agents", "DTAR,DIJKSTRA", "--episodes", std::to_string(episodes)}), &err) != 0) {
      return {false, "eval failed: " + err};
    }
    json_files.push_back(out / "results.json");
  }
  int same = 0;
  std::string differing;
  for (const auto& f : files) {
    const std::string a = slurp(workdir / "run_a" / f);
    if (!a.empty() && a == slurp(workdir / "run_b" / f)) {
      ++same;
    } else {
      differing += " " + f;
    }
  }
  std::ostringstream d;
  d << same << "/" << files.size() << " files byte-identical (train " << timesteps << " steps, eval " << episodes
    << " episodes)";
  if (!differing.empty()) d << "; differ:" << differing;
  return {same == static_cast<int>(files.size()), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtar acceptance suite"};
  std::string config_path;
  std::string workdir = "acceptance_work";
  std::vector<int> only;
  int training_seeds = 3;
  int determinism_episodes = 20;
  app.add_option("--config", config_path, "experiment configuration (desk profile when omitted)");
  app.add_option("--workdir", workdir, "scratch directory for checkpoints and CLI runs");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--training-seeds", training_seeds, "training seeds for criteria 5 and 7 to 10");
  app.add_option("--determinism-episodes", determinism_episodes, "eval episodes per scenario in criterion 11");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? ExperimentConfig::desk() : load_config(config_path);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  const fs::path work(workdir);
  fs::create_directories(work);
  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](std::initializer_list<int> ids) {
    if (selected.empty()) return true;
    for (int id : ids)
      if (selected.count(id)) return true;
    return false;
  };

  std::printf("profile %s: N=%d K=%d, %lld training steps, %d eval episodes per scenario\n", cfg.profile.c_str(),
              cfg.constellation.num_sats(), cfg.partition.num_domains, cfg.train.total_timesteps,
              cfg.eval.episodes_per_scenario);
  std::map<int, std::string> lines;
  int failures = 0;
  auto run = [&](int id, const std::string& name, const std::function<Verdict()>& fn) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    lines[id] = report_line(id, name, v, seconds_since(t0));
    std::printf("       %s\n", lines[id].c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };

  if (wanted({1})) run(1, "partition validity", [&] { return partition_validity(cfg); });

  std::vector<SeedPartition> partitions;
  if (wanted({2})) run(2, "NSGA-II vs uniform", [&] { return nsga_dominance(cfg, partitions); });

  if (wanted({3})) run(3, "oracle equivalence", [&] { return oracle_equivalence(); });
  if (wanted({4})) run(4, "gradient correctness", [&] { return gradient_correctness(cfg.partition.num_domains); });

  auto partition_for = [&](std::uint64_t seed) {
    for (const auto& p : partitions)
      if (p.seed == seed) return p.result.selected;
    return compute_partition(cfg, seed).selected;
  };

  if (wanted({6})) {
    run(6, "fault connectivity", [&] { return fault_connectivity(World::build(cfg.constellation, partition_for(1))); });
  }

  std::vector<TrainedSeed> trained;
  if (wanted({5, 7, 8, 9, 10})) {
    for (int s = 1; s <= training_seeds; ++s) {
      const auto t0 = Clock::now();
      trained.push_back(train_and_evaluate(cfg, partition_for(static_cast<std::uint64_t>(s)),
                                           static_cast<std::uint64_t>(s), work));
      std::printf("       seed %d: trained %lld steps in %.0fs, total %.0fs\n", s, cfg.train.total_timesteps,
                  trained.back().train_secs, seconds_since(t0));
      std::fflush(stdout);
    }
  }
  const long long late = cfg.train.total_timesteps;
  const long long early = late / 10;
  if (wanted({5})) run(5, "mask soundness", [&] { return mask_soundness(trained); });
  if (wanted({7})) run(7, "training convergence", [&] { return convergence(trained, early, late); });
  if (wanted({8})) run(8, "surge CV ordering", [&] { return surge_cv(trained); });
  if (wanted({9})) run(9, "fault SR ordering", [&] { return fault_sr(trained); });

  std::vector<fs::path> json_files;
  if (wanted({10, 11})) {
    run(11, "determinism", [&] {
      return determinism(config_path, work / "determinism", late / 10, determinism_episodes, json_files);
    });
  }
  if (wanted({10})) {
    run(10, "metric identities",
        [&] { return metric_identities(trained, json_files, per_hop_delay_ms(cfg.constellation)); });
  }

  std::printf("\nsummary\n");
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria failed\n", failures, lines.size());
  return failures == 0 ? 0 : 1;
}
