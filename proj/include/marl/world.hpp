#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "marl/vec2.hpp"

namespace marl {

enum class EntityKind { Agent, Adversary, Landmark, Obstacle };

struct EntitySpec {
  double radius = 0.05;
  bool movable = false;
  bool collides = true;  // landmarks are markers, they never collide
  double max_speed = -1.0;  // < 0 means unbounded
  double accel = 1.0;
  EntityKind kind = EntityKind::Landmark;
};

struct Rect {
  double xmin, ymin, xmax, ymax;
};

struct WorldConfig {
  double dt = 0.1;
  double damping = 0.25;
  double contact_stiffness = 100.0;
  double contact_margin = 0.001;
  std::optional<Rect> bounds;  // axis-aligned wall clamp, when present
};

struct WorldState {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::int64_t step_index = 0;
  std::int64_t episode_index = 0;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Soft contact: forces on (a, b). Magnitude uses softplus smoothing of the
// penetration depth; the two forces are exact negations of each other.
// Coincident centers push along +x (documented tie-break).
std::pair<Vec2, Vec2> contact_force(std::size_t a, std::size_t b,
                                    const WorldState& world,
                                    const std::vector<EntitySpec>& specs,
                                    const WorldConfig& cfg);

// True iff center distance is strictly below the radius sum.
bool collision_test(std::size_t a, std::size_t b, const WorldState& world,
                    const std::vector<EntitySpec>& specs);

// One Euler step. `forces` holds one entry per movable entity, in entity
// order, componentwise in [-1, 1] before accel scaling. Order of the update:
// velocity damp, force add, speed clamp, position update, wall clamp.
WorldState step_world(const WorldState& world, const std::vector<Vec2>& forces,
                      const WorldConfig& cfg,
                      const std::vector<EntitySpec>& specs);

}  // namespace marl
