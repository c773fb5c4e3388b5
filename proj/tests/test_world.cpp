#include <cmath>

#include "doctest.h"
#include "marl/world.hpp"

using namespace marl;

namespace {

EntitySpec agent_spec(double radius = 0.05, double max_speed = -1.0,
                      double accel = 1.0) {
  EntitySpec s;
  s.radius = radius;
  s.movable = true;
  s.collides = true;
  s.max_speed = max_speed;
  s.accel = accel;
  s.kind = EntityKind::Agent;
  return s;
}

WorldState one_agent_world(Vec2 p = {}, Vec2 v = {}) {
  WorldState w;
  w.positions = {p};
  w.velocities = {v};
  return w;
}

}  // namespace

TEST_CASE("single Euler step matches hand arithmetic") {
  WorldConfig cfg;  // dt=0.1, damping=0.25
  auto spec = agent_spec();
  spec.collides = false;  // isolate the integrator
  WorldState w = one_agent_world();
  WorldState out = step_world(w, {{1.0, 0.0}}, cfg, {spec});
  CHECK(out.velocities[0].x == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(out.velocities[0].y == 0.0);
  CHECK(out.positions[0].x == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(out.positions[0].y == 0.0);
  CHECK(out.step_index == w.step_index + 1);
}

TEST_CASE("damping shrinks velocity with zero force") {
  WorldConfig cfg;
  auto spec = agent_spec();
  spec.collides = false;
  WorldState w = one_agent_world({0, 0}, {1.0, -2.0});
  WorldState out = step_world(w, {{0.0, 0.0}}, cfg, {spec});
  CHECK(out.velocities[0].x == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(out.velocities[0].y == doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("contact force magnitude in the deep-overlap linear regime") {
  WorldConfig cfg;
  WorldState w;
  w.positions = {{0.0, 0.0}, {0.15, 0.0}};
  w.velocities = {{}, {}};
  std::vector<EntitySpec> specs = {agent_spec(0.1), agent_spec(0.1)};
  auto [fa, fb] = contact_force(0, 1, w, specs, cfg);
  // rsum=0.2, d=0.15 -> z=50, pen=0.05, |f| = 100*0.05 = 5
  CHECK(fa.norm() == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(fa.x == doctest::Approx(-5.0));  // pushes entity 0 away from 1
  CHECK(fa.y == 0.0);
  CHECK(fb.x == -fa.x);  // Newton's third law, exact negation
  CHECK(fb.y == -fa.y);
}

TEST_CASE("contact force decays quickly outside contact") {
  WorldConfig cfg;
  WorldState w;
  w.positions = {{0.0, 0.0}, {0.5, 0.0}};
  w.velocities = {{}, {}};
  std::vector<EntitySpec> specs = {agent_spec(0.1), agent_spec(0.1)};
  auto [fa, fb] = contact_force(0, 1, w, specs, cfg);
  CHECK(fa.norm() < 1e-6);
}

TEST_CASE("coincident centers resolve along +x") {
  WorldConfig cfg;
  WorldState w;
  w.positions = {{0.3, 0.3}, {0.3, 0.3}};
  w.velocities = {{}, {}};
  std::vector<EntitySpec> specs = {agent_spec(), agent_spec()};
  auto [fa, fb] = contact_force(0, 1, w, specs, cfg);
  CHECK(fa.x > 0.0);
  CHECK(fa.y == 0.0);
  CHECK(fb.x < 0.0);
}

TEST_CASE("collision test uses a strict inequality") {
  WorldState w;
  w.positions = {{0.0, 0.0}, {0.2, 0.0}};
  w.velocities = {{}, {}};
  std::vector<EntitySpec> specs = {agent_spec(0.1), agent_spec(0.1)};
  CHECK_FALSE(collision_test(0, 1, w, specs));  // d == rsum exactly
  w.positions[1].x = 0.2 - 1e-12;
  CHECK(collision_test(0, 1, w, specs));
}

TEST_CASE("speed clamp rescales to max_speed") {
  WorldConfig cfg;
  auto spec = agent_spec(0.05, 1.0, 50.0);
  spec.collides = false;
  WorldState w = one_agent_world();
  WorldState out = step_world(w, {{1.0, 1.0}}, cfg, {spec});
  CHECK(out.velocities[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wall clamp pins position and zeroes the blocked component") {
  WorldConfig cfg;
  cfg.bounds = Rect{-1.0, -1.0, 1.0, 1.0};
  auto spec = agent_spec(0.05, -1.0, 1.0);
  spec.collides = false;
  WorldState w = one_agent_world({0.99, 0.0}, {2.0, 0.5});
  WorldState out = step_world(w, {{1.0, 0.0}}, cfg, {spec});
  CHECK(out.positions[0].x == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(out.velocities[0].x == 0.0);
  CHECK(out.velocities[0].y != 0.0);  // free axis untouched
}

TEST_CASE("force vector validation") {
  WorldConfig cfg;
  auto spec = agent_spec();
  WorldState w = one_agent_world();
  CHECK_THROWS_AS(step_world(w, {}, cfg, {spec}), ConfigError);
  CHECK_THROWS_AS(step_world(w, {{1.0, 0.0}, {0.0, 0.0}}, cfg, {spec}),
                  ConfigError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(step_world(w, {{nan, 0.0}}, cfg, {spec}), InputError);
}

TEST_CASE("non-colliding markers exert no contact force") {
  WorldConfig cfg;
  auto agent = agent_spec();
  EntitySpec landmark;  // collides = true by default; make it a marker
  landmark.collides = false;
  WorldState w;
  w.positions = {{0.0, 0.0}, {0.0, 0.0}};  // fully overlapping
  w.velocities = {{}, {}};
  WorldState out = step_world(w, {{0.0, 0.0}}, cfg, {agent, landmark});
  CHECK(out.velocities[0].x == 0.0);
  CHECK(out.velocities[0].y == 0.0);
}

TEST_CASE("two immovable obstacles never move") {
  WorldConfig cfg;
  EntitySpec obstacle;
  obstacle.radius = 0.2;
  obstacle.movable = false;
  obstacle.collides = true;
  WorldState w;
  w.positions = {{0.0, 0.0}, {0.1, 0.0}};
  w.velocities = {{}, {}};
  WorldState out = step_world(w, {}, cfg, {obstacle, obstacle});
  CHECK(out.positions[0].x == 0.0);
  CHECK(out.positions[1].x == 0.1);
}

TEST_CASE("stepping is a pure function of its inputs") {
  WorldConfig cfg;
  std::vector<EntitySpec> specs = {agent_spec(), agent_spec(0.1)};
  WorldState w;
  w.positions = {{0.05, -0.02}, {0.1, 0.01}};
  w.velocities = {{0.3, 0.1}, {-0.2, 0.4}};
  std::vector<Vec2> f = {{0.5, -0.5}, {0.1, 0.9}};
  WorldState a = step_world(w, f, cfg, specs);
  WorldState b = step_world(w, f, cfg, specs);
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    CHECK(a.positions[i].x == b.positions[i].x);
    CHECK(a.positions[i].y == b.positions[i].y);
    CHECK(a.velocities[i].x == b.velocities[i].x);
    CHECK(a.velocities[i].y == b.velocities[i].y);
  }
}
