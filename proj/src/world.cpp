#include "marl/world.hpp"

#include <cmath>

namespace marl {

std::pair<Vec2, Vec2> contact_force(std::size_t a, std::size_t b,
                                    const WorldState& world,
                                    const std::vector<EntitySpec>& specs,
                                    const WorldConfig& cfg) {
  const Vec2 delta = world.positions[a] - world.positions[b];
  const double d = delta.norm();
  const double rsum = specs[a].radius + specs[b].radius;
  // softplus-smoothed penetration: margin * ln(1 + exp((rsum - d) / margin))
  const double z = (rsum - d) / cfg.contact_margin;
  double pen;
  if (z > 30.0) {
    pen = cfg.contact_margin * z;  // log1p(exp(z)) ~ z, avoids overflow
  } else {
    pen = cfg.contact_margin * std::log1p(std::exp(z));
  }
  const double mag = cfg.contact_stiffness * pen;
  Vec2 dir;
  if (d > 0.0) {
    dir = delta * (1.0 / d);
  } else {
    dir = {1.0, 0.0};  // coincident centers: +x tie-break
  }
  const Vec2 f = dir * mag;
  return {f, {-f.x, -f.y}};
}

bool collision_test(std::size_t a, std::size_t b, const WorldState& world,
                    const std::vector<EntitySpec>& specs) {
  const double d = dist(world.positions[a], world.positions[b]);
  return d < specs[a].radius + specs[b].radius;
}

WorldState step_world(const WorldState& world, const std::vector<Vec2>& forces,
                      const WorldConfig& cfg,
                      const std::vector<EntitySpec>& specs) {
  const std::size_t n = world.positions.size();
  std::size_t n_movable = 0;
  for (const auto& s : specs) n_movable += s.movable ? 1 : 0;
  if (forces.size() != n_movable) {
    throw ConfigError("step_world: expected " + std::to_string(n_movable) +
                      " forces, got " + std::to_string(forces.size()));
  }
  for (const auto& f : forces) {
    if (!f.finite()) throw InputError("step_world: non-finite force");
  }

  // accumulate contact forces between colliding pairs
  std::vector<Vec2> total(n, Vec2{});
  for (std::size_t a = 0; a < n; ++a) {
    if (!specs[a].collides) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!specs[b].collides) continue;
      if (!specs[a].movable && !specs[b].movable) continue;
      auto [fa, fb] = contact_force(a, b, world, specs, cfg);
      total[a] += fa;
      total[b] += fb;
    }
  }

  WorldState out = world;
  std::size_t fi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!specs[i].movable) continue;
    const Vec2 applied = forces[fi++] * specs[i].accel;
    Vec2 v = world.velocities[i] * (1.0 - cfg.damping);
    v += (applied + total[i]) * cfg.dt;
    if (specs[i].max_speed > 0.0) {
      const double speed = v.norm();
      if (speed > specs[i].max_speed) v = v * (specs[i].max_speed / speed);
    }
    Vec2 p = world.positions[i] + v * cfg.dt;
    if (cfg.bounds) {
      const Rect& r = *cfg.bounds;
      const double rad = specs[i].radius;
      if (p.x < r.xmin + rad) {
        p.x = r.xmin + rad;
        v.x = 0.0;
      } else if (p.x > r.xmax - rad) {
        p.x = r.xmax - rad;
        v.x = 0.0;
      }
      if (p.y < r.ymin + rad) {
        p.y = r.ymin + rad;
        v.y = 0.0;
      } else if (p.y > r.ymax - rad) {
        p.y = r.ymax - rad;
        v.y = 0.0;
      }
    }
    out.velocities[i] = v;
    out.positions[i] = p;
  }
  out.step_index = world.step_index + 1;
  return out;
}

}  // namespace marl
