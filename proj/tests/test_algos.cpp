#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "marl/algos.hpp"
#include "marl/verify.hpp"

using namespace marl;

namespace {

std::vector<double> policy_flat(const AgentNets& a) {
  std::vector<double> v;
  if (a.lstm) {
    flatten(a.lactor, v);
    flatten(a.lactor_target, v);
  } else {
    flatten(a.actor, v);
    flatten(a.actor_target, v);
  }
  flatten(a.critic, v);
  flatten(a.critic_target, v);
  return v;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("critic input dimension laws") {
  const int d_obs = 6, act = 2;
  for (int n : {3, 6, 9}) {
    const int state = n * d_obs;
    CHECK(critic_input_dim(AlgoId::Maddpg, n, state, d_obs, act) ==
          n * d_obs + n * act);
    CHECK(critic_input_dim(AlgoId::MaddpgLstm, n, state, d_obs, act) ==
          n * d_obs + n * act);
    CHECK(critic_input_dim(AlgoId::MaddpgL, n, state, d_obs, act) ==
          n * d_obs + act);
    CHECK(critic_input_dim(AlgoId::Iddpg, n, state, d_obs, act) ==
          d_obs + act);
    CHECK(critic_input_dim(AlgoId::Facmac, n, state, d_obs, act) ==
          d_obs + act);
  }
}

TEST_CASE("algo and sharing string round-trips") {
  for (AlgoId a : {AlgoId::Iddpg, AlgoId::Maddpg, AlgoId::MaddpgLstm,
                   AlgoId::MaddpgL, AlgoId::Facmac}) {
    CHECK(algo_from_string(to_string(a)) == a);
  }
  CHECK_THROWS(algo_from_string("ppo"));
  for (SharingMode m : {SharingMode::OwnCritics, SharingMode::SimulateWithOwn}) {
    CHECK(sharing_from_string(to_string(m)) == m);
  }
}

TEST_CASE("td target arithmetic") {
  CHECK(td_target(1.0, 2.0, 0.95, false) == doctest::Approx(2.9).epsilon(1e-14));
  CHECK(td_target(1.0, 2.0, 0.95, true) == 1.0);
}

TEST_CASE("n=1 collapse: maddpg, maddpg-l, iddpg, facmac-vdn coincide") {
  const std::uint64_t seed = 314;
  std::vector<std::vector<double>> trajectories;
  for (AlgoId algo :
       {AlgoId::Maddpg, AlgoId::MaddpgL, AlgoId::Iddpg, AlgoId::Facmac}) {
    auto p = verify::make_synth(algo, MixerKind::Vdn, 1, 32, 16, seed);
    for (std::int64_t t = 1; t <= 20; ++t) {
      train_step_update(p.batch, p.team, p.cfg, t);
    }
    trajectories.push_back(policy_flat(p.team.agents[0]));
  }
  for (std::size_t k = 1; k < trajectories.size(); ++k) {
    CHECK(max_abs_diff(trajectories[0], trajectories[k]) < 1e-12);
  }
}

TEST_CASE("actor update follows a constructed critic uphill") {
  auto p = verify::make_synth(AlgoId::Iddpg, MixerKind::Vdn, 1, 64, 16, 7);
  const int d_obs = p.team.agents[0].critic.in_dim() - 2;
  Mlp& critic = p.team.agents[0].critic;
  // zero everything, then wire Q(tau, u) = u[0] through the ReLU hiddens:
  // h1_0 = relu(u0), h1_1 = relu(-u0); h2 passes them through; out = h2_0-h2_1
  for (auto& layer : critic.layers) {
    layer.W.zero();
    std::fill(layer.b.begin(), layer.b.end(), 0.0);
  }
  critic.layers[0].W.at(0, d_obs) = 1.0;
  critic.layers[0].W.at(1, d_obs) = -1.0;
  critic.layers[1].W.at(0, 0) = 1.0;
  critic.layers[1].W.at(1, 1) = 1.0;
  critic.layers[2].W.at(0, 0) = 1.0;
  critic.layers[2].W.at(0, 1) = -1.0;
  auto mean_first_action = [&]() {
    Matrix u = mlp_forward(p.team.agents[0].actor, p.batch.obs[0]);
    double m = 0.0;
    for (int i = 0; i < u.rows; ++i) m += u.at(i, 0);
    return m / u.rows;
  };
  const double before = mean_first_action();
  actor_update(0, p.batch, p.team, p.cfg);
  CHECK(mean_first_action() > before);
}

TEST_CASE("updates touch only the parameters their equations reference") {
  auto p = verify::make_synth(AlgoId::Maddpg, MixerKind::Vdn, 3, 16, 16, 9);
  auto snap = [&]() {
    std::vector<std::vector<double>> s;
    for (const auto& a : p.team.agents) s.push_back(policy_flat(a));
    return s;
  };
  auto before = snap();
  critic_update(1, p.batch, p.team, p.cfg);
  auto after = snap();
  CHECK(max_abs_diff(before[0], after[0]) == 0.0);
  CHECK(max_abs_diff(before[2], after[2]) == 0.0);
  CHECK(max_abs_diff(before[1], after[1]) > 0.0);
  // within agent 1, only the online critic moved
  auto before1_actor = to_flat(p.team.agents[1].actor);
  auto before1_ct = to_flat(p.team.agents[1].critic_target);
  actor_update(1, p.batch, p.team, p.cfg);
  CHECK(to_flat(p.team.agents[1].critic_target) == before1_ct);
  CHECK(to_flat(p.team.agents[1].actor) != before1_actor);
  // targets move only through the soft update
  auto ct = to_flat(p.team.agents[1].critic_target);
  auto at = to_flat(p.team.agents[1].actor_target);
  soft_update_targets(p.team, 0.01);
  CHECK(to_flat(p.team.agents[1].critic_target) != ct);
  CHECK(to_flat(p.team.agents[1].actor_target) != at);
}

TEST_CASE("facmac sharing modes agree iff critics agree") {
  auto p = verify::make_synth(AlgoId::Facmac, MixerKind::Nonmonotonic, 3, 16,
                              16, 21);
  const int n = p.team.n_trained;
  std::vector<Mlp> g;
  for (int a = 0; a < n; ++a) g.push_back(zeros_like(p.team.agents[a].actor));
  const double own = facmac_actor_objective_grads(p.batch, p.team, p.cfg,
                                                  std::nullopt, g);
  const double sim = facmac_actor_objective_grads(p.batch, p.team, p.cfg, 0, g);
  CHECK(own != sim);  // critics were independently initialized
  for (int a = 1; a < n; ++a) {
    from_flat(std::span<const double>(to_flat(p.team.agents[0].critic)),
              p.team.agents[a].critic);
  }
  const double own2 = facmac_actor_objective_grads(p.batch, p.team, p.cfg,
                                                   std::nullopt, g);
  const double sim2 =
      facmac_actor_objective_grads(p.batch, p.team, p.cfg, 0, g);
  CHECK(own2 == doctest::Approx(sim2).epsilon(1e-14));
}

TEST_CASE("staged facmac freezes the mixer before the watershed") {
  auto p = verify::make_synth(AlgoId::Facmac, MixerKind::Nonmonotonic, 3, 16,
                              16, 31);
  p.cfg.staged_watershed = 50;
  const auto mixer_before = to_flat(p.team.mixer);
  facmac_update(p.batch, p.team, p.cfg, 10);
  CHECK(to_flat(p.team.mixer) == mixer_before);  // bit-identical freeze
  // local critics and actors still learn in stage 1
  facmac_update(p.batch, p.team, p.cfg, 49);
  CHECK(to_flat(p.team.mixer) == mixer_before);
  facmac_update(p.batch, p.team, p.cfg, 50);  // watershed: path switches
  CHECK(to_flat(p.team.mixer) != mixer_before);
}

TEST_CASE("facmac rejects unequal team rewards") {
  auto p = verify::make_synth(AlgoId::Facmac, MixerKind::Vdn, 3, 8, 16, 41);
  p.batch.rewards.at(0, 1) += 1.0;
  std::vector<Mlp> cg;
  for (int a = 0; a < 3; ++a) cg.push_back(zeros_like(p.team.agents[a].critic));
  MixerNet mg = zeros_like(p.team.mixer);
  CHECK_THROWS_AS(facmac_critic_loss_grads(p.batch, p.team, p.cfg, cg, mg),
                  ConfigError);
}

TEST_CASE("batch assembly from transitions") {
  Transition t1, t2;
  t1.state = {1.0, 2.0};
  t1.next_state = {3.0, 4.0};
  t1.obs = {{1.0}, {2.0}};
  t1.next_obs = {{3.0}, {4.0}};
  t1.actions = {{0.1, 0.2}, {0.3, 0.4}};
  t1.rewards = {5.0, 6.0};
  t1.terminal = false;
  t2 = t1;
  t2.state = {7.0, 8.0};
  t2.rewards = {-1.0, -2.0};
  t2.terminal = true;
  Batch b = batch_from_transitions({&t1, &t2});
  CHECK(b.size() == 2);
  CHECK(b.n == 2);
  CHECK(b.state.at(0, 1) == 2.0);
  CHECK(b.state.at(1, 0) == 7.0);
  CHECK(b.next_state.at(0, 0) == 3.0);
  CHECK(b.obs[1].at(0, 0) == 2.0);
  CHECK(b.act[0].at(0, 1) == 0.2);
  CHECK(b.act[1].at(1, 0) == 0.3);
  CHECK(b.rewards.at(0, 1) == 6.0);
  CHECK(b.rewards.at(1, 0) == -1.0);
  CHECK(b.terminal[0] == 0.0);
  CHECK(b.terminal[1] == 1.0);
}

TEST_CASE("lstm batch scalars come from the window's final transition") {
  SequenceWindow seq(3);
  for (int s = 0; s < 3; ++s) {
    Transition t;
    t.state = {static_cast<double>(s)};
    t.next_state = {static_cast<double>(s) + 0.5};
    t.obs = {{static_cast<double>(10 + s)}};
    t.next_obs = {{static_cast<double>(20 + s)}};
    t.actions = {{0.0, 0.0}};
    t.rewards = {static_cast<double>(s)};
    t.terminal = (s == 2);
    seq.push(std::move(t));
  }
  Batch b = batch_from_windows({&seq});
  CHECK(b.size() == 1);
  CHECK(b.state.at(0, 0) == 2.0);
  CHECK(b.rewards.at(0, 0) == 2.0);
  CHECK(b.terminal[0] == 1.0);
  REQUIRE(b.obs_win[0][0].size() == 3);
  CHECK(b.obs_win[0][0][0][0] == 10.0);
  CHECK(b.obs_win[0][0][2][0] == 12.0);
  CHECK(b.next_obs_win[0][0][2][0] == 22.0);
}
