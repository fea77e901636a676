#include "dtar/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dtar::harness {

using nlohmann::json;

void EpisodeConfig::validate() const {
  if (steps_per_episode < 1 || flows_per_step < 1 || h_max < 1) {
    throw ConfigError("episode: steps, flows and h_max must be positive");
  }
  if (!(load_rho >= 0.0 && load_rho < 1.0)) throw ConfigError("episode: load_rho must lie in [0, 1)");
  if (weight_normal < 0.0 || weight_surge < 0.0 || weight_fault < 0.0) {
    throw ConfigError("episode: scenario weights must be non-negative");
  }
  if (std::abs(weight_normal + weight_surge + weight_fault - 1.0) > 1e-9) {
    throw ConfigError("episode: scenario weights must sum to 1");
  }
}

void TrainConfig::validate() const {
  if (total_timesteps < 0 || checkpoint_interval < 1 || log_interval < 1 || reward_window < 1) {
    throw ConfigError("train: counts must be positive");
  }
}

void EvalConfig::validate() const {
  if (episodes_per_scenario < 1) throw ConfigError("eval: episodes_per_scenario must be positive");
}

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.derive_schedules();
  return c;
}

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig c;
  c.profile = "full";
  c.constellation.num_planes = 12;
  c.constellation.sats_per_plane = 24;
  c.partition.num_domains = 18;
  c.train.total_timesteps = 2500000;
  c.derive_schedules();
  return c;
}

void ExperimentConfig::derive_schedules() {
  qrlsn.anneal_steps = std::max<long long>(1, train.total_timesteps);
  dqn.anneal_steps = std::max<long long>(1, train.total_timesteps / 10);
}

void ExperimentConfig::validate() const {
  try {
    constellation.validate();
    traffic.validate();
    faults.validate();
    partition.nsga2.validate(constellation.num_sats(), partition.num_domains);
    reward.validate();
    ppo.validate();
    qrlsn.validate();
    dqn.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (partition.traffic_steps < 1) throw ConfigError("partition: traffic_steps must be positive");
  episode.validate();
  train.validate();
  eval.validate();
}

namespace {

// One field list drives both parsing and serialisation.
template <class Visitor>
void visit_fields(Visitor& v, ExperimentConfig& c) {
  auto& k = c.constellation;
  v("constellation", "num_planes", k.num_planes);
  v("constellation", "sats_per_plane", k.sats_per_plane);
  v("constellation", "altitude_km", k.altitude_km);
  v("constellation", "inclination_deg", k.inclination_deg);
  v("constellation", "phasing_factor", k.phasing_factor);
  v("constellation", "earth_radius_km", k.earth_radius_km);
  v("constellation", "mu_km3_s2", k.mu_km3_s2);
  v.pattern("constellation", "pattern", k.pattern);

  auto& t = c.traffic;
  v.hotspots("traffic", "hotspots", t.hotspots);
  v("traffic", "base_intensity", t.base_intensity);
  v("traffic", "total_volume", t.total_volume);
  v("traffic", "diurnal_peak_hour", t.diurnal_peak_hour);
  v("traffic", "surge_multiplier", t.surge_multiplier);
  v("traffic", "noise", t.noise);
  v("traffic", "step_seconds", t.step_seconds);

  v("faults", "fail_prob", c.faults.fail_prob);
  v("faults", "recover_prob", c.faults.recover_prob);

  auto& p = c.partition;
  v("partition", "num_domains", p.num_domains);
  v("partition", "traffic_steps", p.traffic_steps);
  v("partition", "population", p.nsga2.population);
  v("partition", "generations", p.nsga2.generations);
  v("partition", "crossover_prob", p.nsga2.crossover_prob);
  v("partition", "mutation_prob", p.nsga2.mutation_prob);
  v("partition", "tournament_size", p.nsga2.tournament_size);
  v("partition", "min_size", p.nsga2.bounds.min_size);
  v("partition", "max_size", p.nsga2.bounds.max_size);
  v("partition", "init_mutations", p.nsga2.init_mutations);

  auto& e = c.episode;
  v("episode", "steps_per_episode", e.steps_per_episode);
  v("episode", "flows_per_step", e.flows_per_step);
  v("episode", "h_max", e.h_max);
  v("episode", "load_rho", e.load_rho);
  v("episode", "weight_normal", e.weight_normal);
  v("episode", "weight_surge", e.weight_surge);
  v("episode", "weight_fault", e.weight_fault);

  v("reward", "direction", c.reward.direction);
  v("reward", "hop_penalty", c.reward.hop_penalty);
  v("reward", "arrival", c.reward.arrival);
  v("reward", "failure", c.reward.failure);

  auto& o = c.ppo;
  v("ppo", "n_steps", o.n_steps);
  v("ppo", "batch_size", o.batch_size);
  v("ppo", "epochs", o.epochs);
  v("ppo", "lr", o.lr);
  v("ppo", "entropy_coef", o.entropy_coef);
  v("ppo", "value_coef", o.value_coef);
  v("ppo", "clip", o.clip);
  v("ppo", "gamma", o.gamma);
  v("ppo", "lambda", o.lambda);
  v("ppo", "max_grad_norm", o.max_grad_norm);

  auto& q = c.qrlsn;
  v("qrlsn", "alpha", q.alpha);
  v("qrlsn", "gamma", q.gamma);
  v("qrlsn", "epsilon_start", q.epsilon_start);
  v("qrlsn", "epsilon_end", q.epsilon_end);
  v("qrlsn", "anneal_steps", q.anneal_steps);

  auto& d = c.dqn;
  v("dqn", "replay_capacity", d.replay_capacity);
  v("dqn", "batch_size", d.batch_size);
  v("dqn", "target_sync", d.target_sync);
  v("dqn", "train_freq", d.train_freq);
  v("dqn", "learning_starts", d.learning_starts);
  v("dqn", "gamma", d.gamma);
  v("dqn", "lr", d.lr);
  v("dqn", "max_grad_norm", d.max_grad_norm);
  v("dqn", "epsilon_start", d.epsilon_start);
  v("dqn", "epsilon_end", d.epsilon_end);
  v("dqn", "anneal_steps", d.anneal_steps);

  v("train", "total_timesteps", c.train.total_timesteps);
  v("train", "checkpoint_interval", c.train.checkpoint_interval);
  v("train", "log_interval", c.train.log_interval);
  v("train", "reward_window", c.train.reward_window);

  v("eval", "episodes_per_scenario", c.eval.episodes_per_scenario);
}

std::string pattern_name(WalkerPattern p) { return p == WalkerPattern::kDelta ? "delta" : "star"; }

struct Writer {
  json root = json::object();

  template <class T>
  void operator()(const char* section, const char* key, T& value) {
    root[section][key] = value;
  }
  void pattern(const char* section, const char* key, WalkerPattern& p) { root[section][key] = pattern_name(p); }
  void hotspots(const char* section, const char* key, std::vector<TrafficHotspot>& hs) {
    json arr = json::array();
    for (const auto& h : hs) {
      arr.push_back({{"lat_deg", h.lat_deg}, {"lon_deg", h.lon_deg}, {"amplitude", h.amplitude},
                     {"sigma_deg", h.sigma_deg}});
    }
    root[section][key] = std::move(arr);
  }
};

struct Reader {
  const json& root;
  std::map<std::string, std::set<std::string>> known;
  std::set<std::string> set_keys;

  const json* find(const char* section, const char* key) {
    known[section].insert(key);
    auto s = root.find(section);
    if (s == root.end()) return nullptr;
    if (!s->is_object()) throw ConfigError(std::string("section '") + section + "' must be an object");
    auto it = s->find(key);
    if (it == s->end()) return nullptr;
    set_keys.insert(std::string(section) + "." + key);
    return &*it;
  }

  template <class T>
  void operator()(const char* section, const char* key, T& value) {
    if (const json* j = find(section, key)) {
      try {
        if constexpr (std::is_integral_v<T>) {
          if (!j->is_number_integer() && !j->is_number_unsigned()) throw ConfigError("");
          value = j->get<T>();
        } else {
          if (!j->is_number()) throw ConfigError("");
          value = j->get<T>();
        }
      } catch (const std::exception&) {
        throw ConfigError(std::string("bad value for ") + section + "." + key);
      }
    }
  }
  void pattern(const char* section, const char* key, WalkerPattern& p) {
    if (const json* j = find(section, key)) {
      const std::string s = j->is_string() ? j->get<std::string>() : "";
      if (s == "star") {
        p = WalkerPattern::kStar;
      } else if (s == "delta") {
        p = WalkerPattern::kDelta;
      } else {
        throw ConfigError(std::string(section) + "." + key + " must be \"star\" or \"delta\"");
      }
    }
  }
  void hotspots(const char* section, const char* key, std::vector<TrafficHotspot>& hs) {
    if (const json* j = find(section, key)) {
      if (!j->is_array()) throw ConfigError("traffic.hotspots must be an array");
      hs.clear();
      for (const auto& h : *j) {
        try {
          hs.push_back({h.at("lat_deg").get<double>(), h.at("lon_deg").get<double>(),
                        h.at("amplitude").get<double>(), h.at("sigma_deg").get<double>()});
        } catch (const json::exception&) {
          throw ConfigError("traffic.hotspots entries need lat_deg, lon_deg, amplitude, sigma_deg");
        }
      }
    }
  }

  void check_unknown() const {
    for (const auto& [section, body] : root.items()) {
      if (section == "profile") continue;
      auto it = known.find(section);
      if (it == known.end()) throw ConfigError("unknown config section '" + section + "'");
      for (const auto& [key, _] : body.items()) {
        if (!it->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
      }
    }
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  const std::string profile = root.contains("profile") && root["profile"].is_string() ? root["profile"].get<std::string>()
                                                                                       : std::string("desk");
  if (profile == "desk") {
    cfg = ExperimentConfig::desk();
  } else if (profile == "full") {
    cfg = ExperimentConfig::full();
  } else {
    throw ConfigError("unknown profile '" + profile + "'");
  }
  Reader r{root, {}, {}};
  visit_fields(r, cfg);
  r.check_unknown();
  const long long q_anneal = cfg.qrlsn.anneal_steps;
  const long long d_anneal = cfg.dqn.anneal_steps;
  cfg.derive_schedules();
  if (r.set_keys.count("qrlsn.anneal_steps")) cfg.qrlsn.anneal_steps = q_anneal;
  if (r.set_keys.count("dqn.anneal_steps")) cfg.dqn.anneal_steps = d_anneal;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  Writer w;
  w.root["profile"] = cfg.profile;
  visit_fields(w, copy);
  return w.root.dump(2) + "\n";
}

}  // namespace dtar::harness
