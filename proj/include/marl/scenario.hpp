#pragma once

#include <string>
#include <vector>

#include "marl/rng.hpp"
#include "marl/world.hpp"

namespace marl {

enum class ScenarioKind { ObstaclePredatorPrey, Spread, Tunnel, SimpleTunnel };

struct RewardParams {
  double collision_penalty = 1.0;
  double capture_bonus = 10.0;
  double chase_shaping = 0.1;
};

// Canonical entity order: trained agents, adversaries, landmarks, obstacles.
// Policy order: trained agents then adversaries.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Spread;
  std::string name;
  int n_agents = 0;
  int n_adversaries = 0;
  int n_landmarks = 0;
  int n_obstacles = 0;
  std::vector<EntitySpec> specs;
  // Fixed spawn/landmark/obstacle positions (Tunnel family); empty when the
  // scenario randomizes layout on reset.
  std::vector<Vec2> fixed_positions;
  WorldConfig world_cfg;
  RewardParams reward_params;
  int max_episode_len = 100;

  int n_entities() const { return static_cast<int>(specs.size()); }
  int n_policies() const { return n_agents + n_adversaries; }
  int agent_entity(int i) const { return i; }
  int adversary_entity(int i) const { return n_agents + i; }
  int landmark_entity(int i) const { return n_agents + n_adversaries + i; }
  int obstacle_entity(int i) const {
    return n_agents + n_adversaries + n_landmarks + i;
  }
  // Entity index of policy p (agents then adversaries are the movables).
  int policy_entity(int p) const { return p; }
  bool cooperative() const {
    return kind == ScenarioKind::Spread || kind == ScenarioKind::Tunnel;
  }
};

// Supported names: obstacle-predator-prey, spread, tunnel, simple-tunnel
// (n_agents 3/6/9 for spread, 3 for tunnel, 3/6 for simple-tunnel, 3 for
// predator-prey). Unknown combinations throw ConfigError.
ScenarioSpec make_scenario_spec(const std::string& name, int n_agents);

// Deterministic function of the rng state; bumps episode_index.
WorldState reset_world(const ScenarioSpec& spec, Rng& rng,
                       std::int64_t episode_index = 0);

std::pair<ScenarioSpec, WorldState> make_scenario(const std::string& name,
                                                  int n_agents,
                                                  std::uint64_t seed);

int obs_dim(const ScenarioSpec& spec, int policy_index);

std::vector<double> observe(const WorldState& world, int policy_index,
                            const ScenarioSpec& spec);

// Fixed-order concatenation of every policy's observation.
std::vector<double> global_state(const WorldState& world,
                                 const ScenarioSpec& spec);

// One reward per policy (trained agents then adversaries). Collision terms
// are evaluated on world_after.
std::vector<double> reward(const WorldState& world_before,
                           const std::vector<Vec2>& actions,
                           const WorldState& world_after,
                           const ScenarioSpec& spec);

bool is_terminal(const WorldState& world, const ScenarioSpec& spec);

}  // namespace marl
