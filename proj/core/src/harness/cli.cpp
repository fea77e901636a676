#include "dtar/harness/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dtar/harness/config.hpp"
#include "dtar/harness/evaluate.hpp"
#include "dtar/harness/train.hpp"
#include "dtar/nn/checkpoint.hpp"
#include "json.hpp"

namespace dtar::harness {

namespace fs = std::filesystem;
using agents::AgentKind;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

fs::path checkpoint_path(const fs::path& out, AgentKind kind) {
  const std::string ext = kind == AgentKind::kQrlsn ? ".qtable" : ".ckpt";
  return out / (lower(agents::to_string(kind)) + ext);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

AgentKind parse_kind(const std::string& name) {
  auto k = agents::parse_agent_kind(name);
  if (!k) throw UsageError("unknown agent '" + name + "'");
  return *k;
}

void write_partition(const fs::path& out, const Nsga2Result& res) {
  nlohmann::json j;
  j["k"] = res.selected.num_domains();
  j["labels"] = res.selected.labels();
  j["idtr"] = res.selected_obj.idtr;
  j["sigma_l"] = res.selected_obj.sigma_l;
  write_file(out / "partition.json", j.dump(2) + "\n");
  std::ostringstream csv;
  csv << "idtr,sigma_l,labels\n" << std::setprecision(12);
  for (const auto& ind : res.front) {
    csv << ind.obj.idtr << ',' << ind.obj.sigma_l << ',';
    // labels are space-separated inside one field
    for (int i = 0; i < ind.partition.num_sats(); ++i) csv << (i ? " " : "") << ind.partition.label(i);
    csv << '\n';
  }
  write_file(out / "pareto.csv", csv.str());
}

DomainPartition read_partition(const fs::path& path, const ExperimentConfig& cfg) {
  std::ifstream in(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    DomainPartition p(j.at("k").get<int>(), j.at("labels").get<std::vector<int>>());
    if (p.num_domains() != cfg.partition.num_domains || p.num_sats() != cfg.constellation.num_sats()) {
      throw ConfigError("'" + path.string() + "' does not match the configured N and K");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed partition file '" + path.string() + "': " + e.what());
  }
}

/// Partition stored in the output directory, computed and stored if absent.
DomainPartition obtain_partition(const fs::path& out, const ExperimentConfig& cfg, std::uint64_t seed,
                                 std::ostream& log) {
  const fs::path p = out / "partition.json";
  if (fs::exists(p)) return read_partition(p, cfg);
  log << "no partition.json in " << out.string() << ", running the partitioner\n";
  Nsga2Result res = compute_partition(cfg, seed);
  write_partition(out, res);
  return res.selected;
}

std::unique_ptr<agents::RoutingAgent> train_agent(AgentKind kind, const ExperimentConfig& cfg,
                                                  const DomainPartition& part, std::uint64_t seed,
                                                  const fs::path& out, std::ostream& log) {
  if (!agents::is_learned(kind)) throw UsageError(agents::to_string(kind) + " is not a learned agent");
  World world = world_for(kind, cfg, part);
  auto agent = make_agent(kind, cfg, seed);
  TrainOptions opts;
  opts.checkpoint_path = checkpoint_path(out, kind).string();
  TrainResult res = train(*agent, world, cfg, seed, opts);
  std::ostringstream csv;
  write_reward_curve_csv(csv, res.curve);
  write_file(out / (lower(agents::to_string(kind)) + "_reward_curve.csv"), csv.str());
  log << agents::to_string(kind) << ": " << res.timesteps << " steps over " << res.episodes << " episodes, checkpoint "
      << opts.checkpoint_path << '\n';
  return agent;
}

std::vector<EvalRow> run_eval(const std::vector<AgentKind>& kinds, const ExperimentConfig& cfg,
                              const DomainPartition& part, std::uint64_t seed, const fs::path& out, bool trace) {
  std::vector<std::unique_ptr<agents::RoutingAgent>> owned;
  std::vector<World> worlds;
  worlds.reserve(kinds.size());
  for (AgentKind k : kinds) {
    auto agent = make_agent(k, cfg, seed);
    if (agents::is_learned(k)) {
      const fs::path ck = checkpoint_path(out, k);
      if (!fs::exists(ck)) {
        throw std::runtime_error("missing checkpoint for agent " + agents::to_string(k) + ": " + ck.string() +
                                 " (run train --agent " + agents::to_string(k) + " first)");
      }
      agent->load(ck.string());
    }
    owned.push_back(std::move(agent));
    worlds.push_back(world_for(k, cfg, part));
  }
  std::vector<EvalRow> rows;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    for (Scenario s : kAllScenarios) {
      std::ofstream tf;
      if (trace) {
        tf.open(out / ("trace_" + lower(agents::to_string(kinds[i])) + "_" + to_string(s) + ".jsonl"));
      }
      rows.push_back(evaluate_scenario(*owned[i], worlds[i], cfg, s, seed, cfg.eval.episodes_per_scenario,
                                       trace ? &tf : nullptr));
    }
  }
  return rows;
}

void write_results(const fs::path& out, const std::string& stem, const std::vector<EvalRow>& rows) {
  std::ostringstream csv, js;
  write_results_csv(csv, rows);
  write_results_json(js, rows);
  write_file(out / (stem + ".csv"), csv.str());
  write_file(out / (stem + ".json"), js.str());
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic-aware domain partitioning and inter-domain routing for LEO constellations", "dtar"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool trace = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--trace", trace, "write line-delimited episode traces during eval");

  auto* partition_cmd = app.add_subcommand("partition", "run NSGA-II, write partition.json and pareto.csv");

  auto* train_cmd = app.add_subcommand("train", "train one learned agent");
  std::string agent_name;
  long long timesteps = -1;
  train_cmd->add_option("--agent", agent_name, "DTAR, DTAR_MLP, DTAR_RANDPART, QRLSN or CDPAR_DQN")->required();
  train_cmd->add_option("--timesteps", timesteps, "override train.total_timesteps");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate agents on all scenarios");
  std::vector<std::string> agent_names;
  int episodes = -1;
  eval_cmd->add_option("--agents", agent_names, "comma-separated agent list")->required()->delimiter(',');
  eval_cmd->add_option("--episodes", episodes, "override eval.episodes_per_scenario");

  auto* ablate_cmd = app.add_subcommand("ablate", "train and evaluate DTAR, DTAR_MLP and DTAR_RANDPART");
  ablate_cmd->add_option("--timesteps", timesteps, "override train.total_timesteps");
  ablate_cmd->add_option("--episodes", episodes, "override eval.episodes_per_scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? ExperimentConfig::desk() : load_config(config_path);
    if (timesteps >= 0) {
      cfg.train.total_timesteps = timesteps;
      cfg.derive_schedules();
    }
    if (episodes >= 0) cfg.eval.episodes_per_scenario = episodes;
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::vector<AgentKind> eval_kinds;
    AgentKind train_kind = AgentKind::kDtar;
    if (*train_cmd) train_kind = parse_kind(agent_name);
    if (*eval_cmd) {
      for (const auto& n : agent_names) eval_kinds.push_back(parse_kind(n));
      if (eval_kinds.empty()) throw UsageError("--agents needs at least one agent");
    }

    const fs::path out_path(out_dir);
    fs::create_directories(out_path);
    write_file(out_path / "config.json", config_to_json(cfg));

    if (*partition_cmd) {
      Nsga2Result res = compute_partition(cfg, seed);
      write_partition(out_path, res);
      out << "partition: K=" << cfg.partition.num_domains << " idtr=" << res.selected_obj.idtr
          << " sigma_l=" << res.selected_obj.sigma_l << " front=" << res.front.size() << '\n';
    } else if (*train_cmd) {
      const DomainPartition part = obtain_partition(out_path, cfg, seed, out);
      train_agent(train_kind, cfg, part, seed, out_path, out);
    } else if (*eval_cmd) {
      const DomainPartition part = obtain_partition(out_path, cfg, seed, out);
      auto rows = run_eval(eval_kinds, cfg, part, seed, out_path, trace);
      write_results(out_path, "results", rows);
      write_results_csv(out, rows);
    } else if (*ablate_cmd) {
      const DomainPartition part = obtain_partition(out_path, cfg, seed, out);
      const std::vector<AgentKind> kinds{AgentKind::kDtar, AgentKind::kDtarMlp, AgentKind::kDtarRandPart};
      for (AgentKind k : kinds) train_agent(k, cfg, part, seed, out_path, out);
      auto rows = run_eval(kinds, cfg, part, seed, out_path, trace);
      write_results(out_path, "ablation", rows);
      write_results_csv(out, rows);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace dtar::harness
