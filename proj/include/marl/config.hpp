#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "marl/algos.hpp"

namespace marl {

// Fully-resolved run configuration. Defaults follow the reference
// hyperparameter table; scenario presets adjust batch size, sequence length
// and (for simple-tunnel-6a) the critic learning rate.
struct RunConfig {
  std::string scenario = "spread-3a";
  std::string algo = "maddpg";
  std::int64_t time_steps = 2'000'000;
  int max_episode_len = 100;
  int num_adversaries = 0;
  double lr_actor = 0.001;
  double lr_critic = 0.01;
  double epsilon = 0.1;
  double noise_rate = 0.1;
  double gamma = 0.95;
  int batch_size = 256;
  int seq_length = 5;
  std::string mixer = "nonmonotonic";
  std::string sharing = "own-critics";
  std::optional<std::int64_t> staged_watershed;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 5000;
  int eval_episodes = 10;
  std::size_t replay_capacity = 500'000;
  std::string out_dir = "out";

  AlgoConfig algo_config() const;
  // scenario name -> (base scenario, n_agents)
  std::pair<std::string, int> scenario_base() const;
  void validate() const;
};

// Known scenario ids: obstacle-predator-prey, spread-3a, spread-6a,
// spread-9a, tunnel, simple-tunnel, simple-tunnel-6a.
RunConfig preset_for_scenario(const std::string& scenario);

// Flat key-value file ("key = value", # comments); file values override the
// scenario preset, flag overrides (key->value map) override the file.
RunConfig load_config(const std::string& path,
                      const std::map<std::string, std::string>& overrides);
RunConfig config_from_overrides(
    const std::map<std::string, std::string>& overrides);

// Echo of the resolved config, parseable by load_config.
std::string serialize_config(const RunConfig& cfg);

}  // namespace marl
