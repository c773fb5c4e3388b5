#include "marl/config.hpp"

#include <fstream>
#include <sstream>

#include "marl/scenario.hpp"

namespace marl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void apply_kv(RunConfig& cfg, const std::string& key,
              const std::string& value) {
  try {
    if (key == "scenario") {
      cfg.scenario = value;
    } else if (key == "algo") {
      cfg.algo = value;
    } else if (key == "max-episode-len") {
      cfg.max_episode_len = std::stoi(value);
    } else if (key == "time-steps") {
      cfg.time_steps = std::stoll(value);
    } else if (key == "Num-adversaries") {
      cfg.num_adversaries = std::stoi(value);
    } else if (key == "Lr-actor") {
      cfg.lr_actor = std::stod(value);
    } else if (key == "Lr-critic") {
      cfg.lr_critic = std::stod(value);
    } else if (key == "Epsilon") {
      cfg.epsilon = std::stod(value);
    } else if (key == "Noise-rate") {
      cfg.noise_rate = std::stod(value);
    } else if (key == "Gamma") {
      cfg.gamma = std::stod(value);
    } else if (key == "Batch-size") {
      cfg.batch_size = std::stoi(value);
    } else if (key == "seq-length") {
      cfg.seq_length = std::stoi(value);
    } else if (key == "mixer") {
      cfg.mixer = value;
    } else if (key == "sharing") {
      cfg.sharing = value;
    } else if (key == "staged-watershed") {
      cfg.staged_watershed = std::stoll(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "eval-every") {
      cfg.eval_every = std::stoll(value);
    } else if (key == "eval-episodes") {
      cfg.eval_episodes = std::stoi(value);
    } else if (key == "replay-capacity") {
      cfg.replay_capacity = std::stoull(value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for key " + key + ": " + value);
  }
}

std::map<std::string, std::string> parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("malformed config line: " + line);
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

AlgoConfig RunConfig::algo_config() const {
  AlgoConfig a;
  a.algo = algo_from_string(algo);
  a.gamma = gamma;
  a.lr_actor = lr_actor;
  a.lr_critic = lr_critic;
  a.batch_size = batch_size;
  a.seq_length = seq_length;
  a.mixer = mixer_kind_from_string(mixer);
  a.sharing = sharing_from_string(sharing);
  a.staged_watershed = staged_watershed;
  return a;
}

std::pair<std::string, int> RunConfig::scenario_base() const {
  if (scenario == "obstacle-predator-prey") return {scenario, 3};
  if (scenario == "spread-3a") return {"spread", 3};
  if (scenario == "spread-6a") return {"spread", 6};
  if (scenario == "spread-9a") return {"spread", 9};
  if (scenario == "tunnel") return {"tunnel", 3};
  if (scenario == "simple-tunnel") return {"simple-tunnel", 3};
  if (scenario == "simple-tunnel-6a") return {"simple-tunnel", 6};
  throw ConfigError("unknown scenario: " + scenario);
}

void RunConfig::validate() const {
  scenario_base();                   // known scenario
  const AlgoId id = algo_from_string(algo);
  mixer_kind_from_string(mixer);
  sharing_from_string(sharing);
  if (id == AlgoId::Facmac && scenario.starts_with("simple-tunnel")) {
    throw ConfigError(
        "facmac requires a shared reward and is not supported on " + scenario);
  }
  if (time_steps < 0) throw ConfigError("time-steps must be >= 0");
  if (max_episode_len <= 0) throw ConfigError("max-episode-len must be > 0");
  if (batch_size <= 0) throw ConfigError("Batch-size must be > 0");
  if (seq_length < 1) throw ConfigError("seq-length must be >= 1");
  if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("Gamma must be in [0,1)");
  if (eval_every <= 0) throw ConfigError("eval-every must be > 0");
  if (eval_episodes <= 0) throw ConfigError("eval-episodes must be > 0");
}

RunConfig preset_for_scenario(const std::string& scenario) {
  RunConfig cfg;
  cfg.scenario = scenario;
  if (scenario == "obstacle-predator-prey") {
    cfg.num_adversaries = 1;
    cfg.batch_size = 256;
    cfg.seq_length = 3;
  } else if (scenario == "spread-3a") {
    cfg.batch_size = 128;
    cfg.seq_length = 5;
  } else if (scenario == "spread-6a" || scenario == "spread-9a") {
    cfg.batch_size = 32;
    cfg.seq_length = 3;
  } else if (scenario == "tunnel" || scenario == "simple-tunnel") {
    cfg.batch_size = 128;
    cfg.seq_length = 5;
  } else if (scenario == "simple-tunnel-6a") {
    cfg.batch_size = 32;
    cfg.seq_length = 3;
    cfg.lr_critic = 0.001;
  } else {
    throw ConfigError("unknown scenario: " + scenario);
  }
  return cfg;
}

RunConfig load_config(const std::string& path,
                      const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> file_kv;
  if (!path.empty()) file_kv = parse_file(path);
  // scenario resolves flags > file > default, then seeds the preset
  std::string scenario = "spread-3a";
  if (auto it = file_kv.find("scenario"); it != file_kv.end()) {
    scenario = it->second;
  }
  if (auto it = overrides.find("scenario"); it != overrides.end()) {
    scenario = it->second;
  }
  RunConfig cfg = preset_for_scenario(scenario);
  for (const auto& [k, v] : file_kv) apply_kv(cfg, k, v);
  for (const auto& [k, v] : overrides) apply_kv(cfg, k, v);
  cfg.validate();
  return cfg;
}

RunConfig config_from_overrides(
    const std::map<std::string, std::string>& overrides) {
  return load_config("", overrides);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "scenario = " << cfg.scenario << "\n";
  out << "algo = " << cfg.algo << "\n";
  out << "time-steps = " << cfg.time_steps << "\n";
  out << "max-episode-len = " << cfg.max_episode_len << "\n";
  out << "Num-adversaries = " << cfg.num_adversaries << "\n";
  out << "Lr-actor = " << cfg.lr_actor << "\n";
  out << "Lr-critic = " << cfg.lr_critic << "\n";
  out << "Epsilon = " << cfg.epsilon << "\n";
  out << "Noise-rate = " << cfg.noise_rate << "\n";
  out << "Gamma = " << cfg.gamma << "\n";
  out << "Batch-size = " << cfg.batch_size << "\n";
  out << "seq-length = " << cfg.seq_length << "\n";
  out << "mixer = " << cfg.mixer << "\n";
  out << "sharing = " << cfg.sharing << "\n";
  if (cfg.staged_watershed) {
    out << "staged-watershed = " << *cfg.staged_watershed << "\n";
  }
  out << "seed = " << cfg.seed << "\n";
  out << "eval-every = " << cfg.eval_every << "\n";
  out << "eval-episodes = " << cfg.eval_episodes << "\n";
  out << "replay-capacity = " << cfg.replay_capacity << "\n";
  out << "out = " << cfg.out_dir << "\n";
  return out.str();
}

}  // namespace marl
