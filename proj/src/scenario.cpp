#include "marl/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace marl {

namespace {

EntitySpec agent_spec(double radius, double max_speed, double accel,
                      EntityKind kind) {
  EntitySpec s;
  s.radius = radius;
  s.movable = true;
  s.collides = true;
  s.max_speed = max_speed;
  s.accel = accel;
  s.kind = kind;
  return s;
}

EntitySpec landmark_spec(double radius) {
  EntitySpec s;
  s.radius = radius;
  s.movable = false;
  s.collides = false;
  s.kind = EntityKind::Landmark;
  return s;
}

EntitySpec obstacle_spec(double radius) {
  EntitySpec s;
  s.radius = radius;
  s.movable = false;
  s.collides = true;
  s.kind = EntityKind::Obstacle;
  return s;
}

// Two overlapping disc rows at y=0 leaving a corridor of width 0.3 at x=0.
void tunnel_obstacles(ScenarioSpec& spec) {
  const double r = 0.1;
  for (int side = 0; side < 2; ++side) {
    for (int i = 0; i < 16; ++i) {
      double x = 0.25 + 0.05 * i;
      if (side == 0) x = -x;
      spec.specs.push_back(obstacle_spec(r));
      spec.fixed_positions.push_back({x, 0.0});
      ++spec.n_obstacles;
    }
  }
}

std::vector<double> tunnel_slots(int n) {
  std::vector<double> xs(n);
  const double span = 0.2 * (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = -span / 2.0 + 0.2 * i;
  return xs;
}

// MPE-style soft boundary penalty, applied per coordinate to the prey.
double bound_penalty(double x) {
  const double ax = std::abs(x);
  if (ax < 0.9) return 0.0;
  if (ax < 1.0) return (ax - 0.9) * 10.0;
  return std::min(std::exp(2.0 * ax - 2.0), 10.0);
}

}  // namespace

ScenarioSpec make_scenario_spec(const std::string& name, int n_agents) {
  ScenarioSpec spec;
  spec.name = name;
  spec.n_agents = n_agents;
  if (name == "spread") {
    if (n_agents != 3 && n_agents != 6 && n_agents != 9) {
      throw ConfigError("spread supports 3, 6 or 9 agents");
    }
    spec.kind = ScenarioKind::Spread;
    spec.n_landmarks = n_agents;
    spec.n_obstacles = 1;
    for (int i = 0; i < n_agents; ++i) {
      spec.specs.push_back(agent_spec(0.05, 1.0, 3.0, EntityKind::Agent));
    }
    for (int i = 0; i < spec.n_landmarks; ++i) {
      spec.specs.push_back(landmark_spec(0.05));
    }
    spec.specs.push_back(obstacle_spec(0.2));
  } else if (name == "tunnel" || name == "simple-tunnel") {
    const bool simple = name == "simple-tunnel";
    if ((simple && n_agents != 3 && n_agents != 6) || (!simple && n_agents != 3)) {
      throw ConfigError(name + " supports " + (simple ? "3 or 6" : "3") +
                        " agents");
    }
    spec.kind = simple ? ScenarioKind::SimpleTunnel : ScenarioKind::Tunnel;
    spec.n_landmarks = n_agents;
    const auto xs = tunnel_slots(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      spec.specs.push_back(agent_spec(0.05, 1.0, 3.0, EntityKind::Agent));
      spec.fixed_positions.push_back({xs[i], -0.7});
    }
    for (int i = 0; i < n_agents; ++i) {
      spec.specs.push_back(landmark_spec(0.05));
      spec.fixed_positions.push_back({xs[i], 0.7});
    }
    tunnel_obstacles(spec);
    if (simple) {
      spec.world_cfg.bounds = Rect{-1.0, -1.0, 1.0, 1.0};
    }
  } else if (name == "obstacle-predator-prey") {
    if (n_agents < 1) throw ConfigError("predator-prey needs >= 1 predator");
    spec.kind = ScenarioKind::ObstaclePredatorPrey;
    spec.n_adversaries = 1;
    spec.n_obstacles = 2;
    for (int i = 0; i < n_agents; ++i) {
      spec.specs.push_back(agent_spec(0.075, 1.0, 3.0, EntityKind::Agent));
    }
    spec.specs.push_back(agent_spec(0.05, 1.3, 4.0, EntityKind::Adversary));
    for (int i = 0; i < spec.n_obstacles; ++i) {
      spec.specs.push_back(obstacle_spec(0.2));
    }
  } else {
    throw ConfigError("unknown scenario: " + name);
  }
  return spec;
}

WorldState reset_world(const ScenarioSpec& spec, Rng& rng,
                       std::int64_t episode_index) {
  WorldState w;
  const int n = spec.n_entities();
  w.positions.assign(n, Vec2{});
  w.velocities.assign(n, Vec2{});
  w.step_index = 0;
  w.episode_index = episode_index;
  if (!spec.fixed_positions.empty()) {
    // Tunnel family: everything is pinned.
    for (int i = 0; i < n; ++i) w.positions[i] = spec.fixed_positions[i];
    return w;
  }
  switch (spec.kind) {
    case ScenarioKind::Spread: {
      for (int i = 0; i < spec.n_agents; ++i) {
        w.positions[spec.agent_entity(i)] = {rng.uniform(-0.9, 0.9),
                                             rng.uniform(-0.9, 0.9)};
      }
      for (int i = 0; i < spec.n_landmarks; ++i) {
        w.positions[spec.landmark_entity(i)] = {rng.uniform(-0.9, 0.9),
                                                rng.uniform(-0.9, 0.9)};
      }
      for (int i = 0; i < spec.n_obstacles; ++i) {
        w.positions[spec.obstacle_entity(i)] = {rng.uniform(-0.5, 0.5),
                                                rng.uniform(-0.5, 0.5)};
      }
      break;
    }
    case ScenarioKind::ObstaclePredatorPrey: {
      for (int i = 0; i < spec.n_agents; ++i) {
        w.positions[spec.agent_entity(i)] = {rng.uniform(-0.9, 0.9),
                                             rng.uniform(-0.9, 0.9)};
      }
      for (int i = 0; i < spec.n_adversaries; ++i) {
        w.positions[spec.adversary_entity(i)] = {rng.uniform(-0.9, 0.9),
                                                 rng.uniform(-0.9, 0.9)};
      }
      for (int i = 0; i < spec.n_obstacles; ++i) {
        w.positions[spec.obstacle_entity(i)] = {rng.uniform(-0.8, 0.8),
                                                rng.uniform(-0.8, 0.8)};
      }
      break;
    }
    default:
      break;
  }
  return w;
}

std::pair<ScenarioSpec, WorldState> make_scenario(const std::string& name,
                                                  int n_agents,
                                                  std::uint64_t seed) {
  ScenarioSpec spec = make_scenario_spec(name, n_agents);
  Rng rng = Rng::substream(seed, "env");
  return {spec, reset_world(spec, rng)};
}

int obs_dim(const ScenarioSpec& spec, int policy_index) {
  switch (spec.kind) {
    case ScenarioKind::Spread:
    case ScenarioKind::Tunnel:
      return 4 + 2 * spec.n_landmarks + 2 * (spec.n_agents - 1);
    case ScenarioKind::SimpleTunnel:
      return 2 + 4 + 2 * spec.n_landmarks + 2 * (spec.n_agents - 1);
    case ScenarioKind::ObstaclePredatorPrey:
      if (policy_index < spec.n_agents) {
        // predator: vel, pos, obstacles, other predators, prey pos + vel
        return 4 + 2 * spec.n_obstacles + 2 * (spec.n_agents - 1) + 4;
      }
      // prey: vel, pos, obstacles, predators
      return 4 + 2 * spec.n_obstacles + 2 * spec.n_agents;
  }
  return 0;
}

std::vector<double> observe(const WorldState& world, int policy_index,
                            const ScenarioSpec& spec) {
  std::vector<double> v;
  v.reserve(obs_dim(spec, policy_index));
  const int e = spec.policy_entity(policy_index);
  const Vec2 p = world.positions[e];
  auto push = [&](const Vec2& q) {
    v.push_back(q.x);
    v.push_back(q.y);
  };
  auto push_rel = [&](int other) { push(world.positions[other] - p); };

  if (spec.kind == ScenarioKind::SimpleTunnel) {
    push_rel(spec.landmark_entity(policy_index));  // designated target
  }
  push(world.velocities[e]);
  push(p);
  if (spec.kind == ScenarioKind::ObstaclePredatorPrey) {
    for (int i = 0; i < spec.n_obstacles; ++i) push_rel(spec.obstacle_entity(i));
    if (policy_index < spec.n_agents) {
      for (int i = 0; i < spec.n_agents; ++i) {
        if (i != policy_index) push_rel(spec.agent_entity(i));
      }
      push_rel(spec.adversary_entity(0));
      push(world.velocities[spec.adversary_entity(0)]);
    } else {
      for (int i = 0; i < spec.n_agents; ++i) push_rel(spec.agent_entity(i));
    }
  } else {
    for (int i = 0; i < spec.n_landmarks; ++i) push_rel(spec.landmark_entity(i));
    for (int i = 0; i < spec.n_agents; ++i) {
      if (i != policy_index) push_rel(spec.agent_entity(i));
    }
  }
  return v;
}

std::vector<double> global_state(const WorldState& world,
                                 const ScenarioSpec& spec) {
  std::vector<double> s;
  for (int p = 0; p < spec.n_policies(); ++p) {
    auto o = observe(world, p, spec);
    s.insert(s.end(), o.begin(), o.end());
  }
  return s;
}

std::vector<double> reward(const WorldState& world_before,
                           const std::vector<Vec2>& /*actions*/,
                           const WorldState& world_after,
                           const ScenarioSpec& spec) {
  const WorldState& w = world_after;
  std::vector<double> r(spec.n_policies(), 0.0);
  switch (spec.kind) {
    case ScenarioKind::Spread:
    case ScenarioKind::Tunnel: {
      double shared = 0.0;
      for (int l = 0; l < spec.n_landmarks; ++l) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < spec.n_agents; ++a) {
          best = std::min(best, dist(w.positions[spec.landmark_entity(l)],
                                     w.positions[spec.agent_entity(a)]));
        }
        shared -= best;
      }
      // team penalty: each colliding agent-agent pair once, plus each
      // agent-obstacle contact; shared so cooperative rewards stay identical
      int collisions = 0;
      for (int a = 0; a < spec.n_agents; ++a) {
        for (int b = a + 1; b < spec.n_agents; ++b) {
          if (collision_test(spec.agent_entity(a), spec.agent_entity(b), w,
                             spec.specs)) {
            ++collisions;
          }
        }
        for (int o = 0; o < spec.n_obstacles; ++o) {
          if (collision_test(spec.agent_entity(a), spec.obstacle_entity(o), w,
                             spec.specs)) {
            ++collisions;
          }
        }
      }
      shared -= spec.reward_params.collision_penalty * collisions;
      std::fill(r.begin(), r.end(), shared);
      break;
    }
    case ScenarioKind::SimpleTunnel: {
      for (int a = 0; a < spec.n_agents; ++a) {
        double ra = -dist(w.positions[spec.agent_entity(a)],
                          w.positions[spec.landmark_entity(a)]);
        int collisions = 0;
        for (int b = 0; b < spec.n_agents; ++b) {
          if (b != a && collision_test(spec.agent_entity(a),
                                       spec.agent_entity(b), w, spec.specs)) {
            ++collisions;
          }
        }
        for (int o = 0; o < spec.n_obstacles; ++o) {
          if (collision_test(spec.agent_entity(a), spec.obstacle_entity(o), w,
                             spec.specs)) {
            ++collisions;
          }
        }
        r[a] = ra - spec.reward_params.collision_penalty * collisions;
      }
      break;
    }
    case ScenarioKind::ObstaclePredatorPrey: {
      const int prey = spec.adversary_entity(0);
      double mind = std::numeric_limits<double>::infinity();
      int captures = 0;
      for (int a = 0; a < spec.n_agents; ++a) {
        mind = std::min(mind,
                        dist(w.positions[spec.agent_entity(a)], w.positions[prey]));
        if (collision_test(spec.agent_entity(a), prey, w, spec.specs)) {
          ++captures;
        }
      }
      const double shaping = spec.reward_params.chase_shaping * mind;
      const double capture = spec.reward_params.capture_bonus * captures;
      for (int a = 0; a < spec.n_agents; ++a) r[a] = -shaping + capture;
      double prey_r = shaping - capture;
      prey_r -= bound_penalty(w.positions[prey].x);
      prey_r -= bound_penalty(w.positions[prey].y);
      r[spec.n_agents] = prey_r;
      break;
    }
  }
  return r;
}

bool is_terminal(const WorldState& world, const ScenarioSpec& spec) {
  return world.step_index >= spec.max_episode_len;
}

}  // namespace marl
