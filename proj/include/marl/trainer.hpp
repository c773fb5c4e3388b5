#pragma once

#include <string>
#include <vector>

#include "marl/checkpoint.hpp"
#include "marl/config.hpp"
#include "marl/metrics.hpp"
#include "marl/scenario.hpp"

namespace marl {

struct RunArtifacts {
  std::string out_dir;
  std::string metrics_path;
  std::string checkpoint_path;
  std::string config_path;
  std::string svg_path;
  std::int64_t updates = 0;
  std::int64_t episodes = 0;
};

// Interaction/training loop: explore, store, update once the buffer is
// ready, evaluate periodically, checkpoint at the end. Deterministic given
// (config, seed); wall-clock timings go to a separate timing.csv so
// metrics.csv stays bit-reproducible.
RunArtifacts train(const RunConfig& cfg);

// Noise-free evaluation of a team: per-policy mean undiscounted episode
// return over `episodes` episodes.
std::vector<double> evaluate_team(const TeamNets& team,
                                  const ScenarioSpec& spec,
                                  const AlgoConfig& algo, int episodes,
                                  Rng rng);

// Rebuilds the team recorded in a checkpoint and evaluates it.
std::vector<double> evaluate_checkpoint(const std::string& checkpoint_path,
                                        const std::string& scenario,
                                        int episodes, std::uint64_t seed);

// Oracle rollouts used for baselines: uniform-random actions / zero actions.
double random_policy_return(const ScenarioSpec& spec, int episodes, Rng rng);
double stationary_policy_return(const ScenarioSpec& spec, int episodes,
                                Rng rng);

// Mean return across trained agents.
double trained_mean(const std::vector<double>& per_policy, int n_trained);

}  // namespace marl
