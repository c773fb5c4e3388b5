#include "marl/algos.hpp"

#include <cmath>

#include "marl/world.hpp"  // ConfigError

namespace marl {

AlgoId algo_from_string(const std::string& s) {
  if (s == "iddpg") return AlgoId::Iddpg;
  if (s == "maddpg") return AlgoId::Maddpg;
  if (s == "maddpg-lstm") return AlgoId::MaddpgLstm;
  if (s == "maddpg-l") return AlgoId::MaddpgL;
  if (s == "facmac") return AlgoId::Facmac;
  throw ConfigError("unknown algorithm: " + s);
}

std::string to_string(AlgoId a) {
  switch (a) {
    case AlgoId::Iddpg: return "iddpg";
    case AlgoId::Maddpg: return "maddpg";
    case AlgoId::MaddpgLstm: return "maddpg-lstm";
    case AlgoId::MaddpgL: return "maddpg-l";
    case AlgoId::Facmac: return "facmac";
  }
  return "?";
}

SharingMode sharing_from_string(const std::string& s) {
  if (s == "own-critics") return SharingMode::OwnCritics;
  if (s == "simulate-with-own") return SharingMode::SimulateWithOwn;
  throw ConfigError("unknown sharing mode: " + s);
}

std::string to_string(SharingMode m) {
  return m == SharingMode::OwnCritics ? "own-critics" : "simulate-with-own";
}

int critic_input_dim(AlgoId algo, int n_policies, int state_dim, int d_obs,
                     int act_dim) {
  switch (algo) {
    case AlgoId::Maddpg:
    case AlgoId::MaddpgLstm:
      return state_dim + n_policies * act_dim;
    case AlgoId::MaddpgL:
      return state_dim + act_dim;
    case AlgoId::Iddpg:
    case AlgoId::Facmac:
      return d_obs + act_dim;
  }
  return 0;
}

TeamNets make_team(const AlgoConfig& cfg, const std::vector<int>& obs_dims,
                   int n_trained, int state_dim, int act_dim, Rng& rng) {
  TeamNets team;
  team.n_trained = n_trained;
  const int n = static_cast<int>(obs_dims.size());
  const int h = cfg.hidden;
  // Small final-layer init: actors start near-zero and critics start flat,
  // which keeps early deterministic-policy-gradient updates stable.
  constexpr double kHeadScale = 0.05;
  auto shrink = [](DenseLayer& l) {
    for (double& w : l.W.a) w *= kHeadScale;
    for (double& b : l.b) b *= kHeadScale;
  };
  for (int a = 0; a < n; ++a) {
    AgentNets nets;
    nets.lstm = cfg.algo == AlgoId::MaddpgLstm;
    if (nets.lstm) {
      nets.lactor = make_lstm_actor(obs_dims[a], h, h, act_dim, rng);
      shrink(nets.lactor.head);
      nets.lactor_target = nets.lactor;
    } else {
      nets.actor = make_mlp({obs_dims[a], h, h, act_dim}, Act::Tanh, rng);
      shrink(nets.actor.layers.back());
      nets.actor_target = nets.actor;
    }
    // FACMAC adversaries (outside the mixed team) fall back to the
    // independent DDPG critic shape.
    const AlgoId critic_algo =
        (cfg.algo == AlgoId::Facmac && a >= n_trained) ? AlgoId::Iddpg
                                                       : cfg.algo;
    const int in =
        critic_input_dim(critic_algo, n, state_dim, obs_dims[a], act_dim);
    nets.critic = make_mlp({in, h, h, 1}, Act::Identity, rng);
    shrink(nets.critic.layers.back());
    nets.critic_target = nets.critic;
    team.agents.push_back(std::move(nets));
  }
  if (cfg.algo == AlgoId::Facmac) {
    team.mixer =
        make_mixer(cfg.mixer, n_trained, state_dim, cfg.mixer_embed, rng);
    team.mixer_target = team.mixer;
  }
  return team;
}

Batch batch_from_transitions(const std::vector<const Transition*>& sample) {
  Batch b;
  const int B = static_cast<int>(sample.size());
  const Transition& t0 = *sample[0];
  b.n = static_cast<int>(t0.obs.size());
  const int S = static_cast<int>(t0.state.size());
  b.state = Matrix(B, S);
  b.next_state = Matrix(B, S);
  b.rewards = Matrix(B, b.n);
  b.terminal.assign(B, 0.0);
  b.obs.resize(b.n);
  b.next_obs.resize(b.n);
  b.act.resize(b.n);
  for (int a = 0; a < b.n; ++a) {
    const int d = static_cast<int>(t0.obs[a].size());
    b.obs[a] = Matrix(B, d);
    b.next_obs[a] = Matrix(B, d);
    b.act[a] = Matrix(B, static_cast<int>(t0.actions[a].size()));
  }
  for (int i = 0; i < B; ++i) {
    const Transition& t = *sample[i];
    std::copy(t.state.begin(), t.state.end(), b.state.row(i));
    std::copy(t.next_state.begin(), t.next_state.end(), b.next_state.row(i));
    for (int a = 0; a < b.n; ++a) {
      std::copy(t.obs[a].begin(), t.obs[a].end(), b.obs[a].row(i));
      std::copy(t.next_obs[a].begin(), t.next_obs[a].end(),
                b.next_obs[a].row(i));
      std::copy(t.actions[a].begin(), t.actions[a].end(), b.act[a].row(i));
      b.rewards.at(i, a) = t.rewards[a];
    }
    b.terminal[i] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

Batch batch_from_windows(const std::vector<const SequenceWindow*>& sample) {
  std::vector<const Transition*> finals;
  finals.reserve(sample.size());
  for (const auto* w : sample) finals.push_back(&w->back());
  Batch b = batch_from_transitions(finals);
  b.obs_win.resize(b.n);
  b.next_obs_win.resize(b.n);
  for (int a = 0; a < b.n; ++a) {
    b.obs_win[a].reserve(sample.size());
    b.next_obs_win[a].reserve(sample.size());
    for (const auto* w : sample) {
      b.obs_win[a].push_back(observation_window(*w, a));
      b.next_obs_win[a].push_back(next_observation_window(*w, a));
    }
  }
  return b;
}

double td_target(double reward, double next_value, double gamma,
                 bool terminal) {
  return reward + gamma * next_value * (terminal ? 0.0 : 1.0);
}

namespace {

// Deterministic action of target actor b over the batch.
Matrix target_actions_of(int b_agent, const Batch& batch,
                         const TeamNets& nets) {
  const AgentNets& an = nets.agents[b_agent];
  if (!an.lstm) {
    return mlp_forward(an.actor_target, batch.next_obs[b_agent]);
  }
  const auto& wins = batch.next_obs_win[b_agent];
  const int B = batch.size();
  Matrix out(B, static_cast<int>(an.lactor_target.head.b.size()));
  for (int i = 0; i < B; ++i) {
    auto u = lstm_actor_forward(an.lactor_target, wins[i]);
    std::copy(u.begin(), u.end(), out.row(i));
  }
  return out;
}

Matrix all_actions(const Batch& batch, int override_agent,
                   const Matrix* override_act) {
  Matrix out = batch.act[0].rows ? Matrix(batch.size(), 0) : Matrix();
  for (int a = 0; a < batch.n; ++a) {
    const Matrix& src =
        (a == override_agent && override_act) ? *override_act : batch.act[a];
    out = out.cols == 0 && a == 0 ? src : hconcat(out, src);
  }
  return out;
}

// Critic input for agent a under the given update rule, with the action
// block optionally overridden by a recomputed action.
Matrix critic_input(AlgoId algo, int a, const Batch& batch, bool next,
                    const Matrix* own_act, const TeamNets* nets_for_targets) {
  const Matrix& state = next ? batch.next_state : batch.state;
  const Matrix& obs = next ? batch.next_obs[a] : batch.obs[a];
  switch (algo) {
    case AlgoId::Maddpg:
    case AlgoId::MaddpgLstm: {
      if (next) {
        // all target actions
        Matrix acts = target_actions_of(0, batch, *nets_for_targets);
        for (int b = 1; b < batch.n; ++b) {
          acts = hconcat(acts, target_actions_of(b, batch, *nets_for_targets));
        }
        return hconcat(state, acts);
      }
      return hconcat(state, all_actions(batch, a, own_act));
    }
    case AlgoId::MaddpgL: {
      if (next) {
        return hconcat(state, target_actions_of(a, batch, *nets_for_targets));
      }
      return hconcat(state, own_act ? *own_act : batch.act[a]);
    }
    case AlgoId::Iddpg:
    case AlgoId::Facmac: {
      if (next) {
        return hconcat(obs, target_actions_of(a, batch, *nets_for_targets));
      }
      return hconcat(obs, own_act ? *own_act : batch.act[a]);
    }
  }
  return {};
}

// Offset of agent a's action block inside its critic input.
int action_offset(AlgoId algo, int a, const Batch& batch) {
  switch (algo) {
    case AlgoId::Maddpg:
    case AlgoId::MaddpgLstm: {
      int off = batch.state.cols;
      for (int b = 0; b < a; ++b) off += batch.act[b].cols;
      return off;
    }
    case AlgoId::MaddpgL:
      return batch.state.cols;
    case AlgoId::Iddpg:
    case AlgoId::Facmac:
      return batch.obs[a].cols;
  }
  return 0;
}

Matrix slice_cols(const Matrix& m, int off, int width) {
  Matrix out(m.rows, width);
  for (int i = 0; i < m.rows; ++i) {
    const double* src = m.row(i);
    double* dst = out.row(i);
    for (int k = 0; k < width; ++k) dst[k] = src[off + k];
  }
  return out;
}

// Online recomputation of agent a's batch actions, with caches for backprop.
struct OnlineActions {
  Matrix act;
  MlpCache mlp_cache;
  std::vector<LstmActorCache> lstm_caches;
};

OnlineActions online_actions(int a, const Batch& batch, const AgentNets& an) {
  OnlineActions out;
  if (!an.lstm) {
    out.act = mlp_forward(an.actor, batch.obs[a], &out.mlp_cache);
    return out;
  }
  const auto& wins = batch.obs_win[a];
  const int B = batch.size();
  out.act = Matrix(B, static_cast<int>(an.lactor.head.b.size()));
  out.lstm_caches.resize(B);
  for (int i = 0; i < B; ++i) {
    auto u = lstm_actor_forward(an.lactor, wins[i], &out.lstm_caches[i]);
    std::copy(u.begin(), u.end(), out.act.row(i));
  }
  return out;
}

void actor_backprop(int a, const Batch& batch, const AgentNets& an,
                    const OnlineActions& oa, const Matrix& dact,
                    Mlp& mlp_grads, LstmActor& lstm_grads) {
  if (!an.lstm) {
    mlp_backward(an.actor, oa.mlp_cache, dact, mlp_grads);
    return;
  }
  const int B = batch.size();
  const int A = dact.cols;
  for (int i = 0; i < B; ++i) {
    std::vector<double> d(dact.row(i), dact.row(i) + A);
    lstm_actor_backward(an.lactor, oa.lstm_caches[i], d, lstm_grads);
  }
}

double team_reward(const Batch& batch, int n_trained, int row) {
  const double r0 = batch.rewards.at(row, 0);
  for (int a = 1; a < n_trained; ++a) {
    if (batch.rewards.at(row, a) != r0) {
      throw ConfigError(
          "facmac requires a shared team reward; got unequal rewards");
    }
  }
  return r0;
}

}  // namespace

double critic_loss_grads(int a, const Batch& batch, const TeamNets& nets,
                         const AlgoConfig& cfg, Mlp& grads) {
  const AgentNets& an = nets.agents[a];
  const int B = batch.size();
  Matrix tgt_in = critic_input(cfg.algo, a, batch, true, nullptr, &nets);
  Matrix q_next = mlp_forward(an.critic_target, tgt_in);
  Matrix in = critic_input(cfg.algo, a, batch, false, nullptr, nullptr);
  MlpCache cache;
  Matrix q = mlp_forward(an.critic, in, &cache);
  double loss = 0.0;
  Matrix dq(B, 1);
  for (int i = 0; i < B; ++i) {
    const double y = td_target(batch.rewards.at(i, a), q_next.at(i, 0),
                               cfg.gamma, batch.terminal[i] != 0.0);
    const double err = q.at(i, 0) - y;
    loss += err * err;
    dq.at(i, 0) = 2.0 * err / B;
  }
  loss /= B;
  mlp_backward(an.critic, cache, dq, grads);
  return loss;
}

double critic_update(int a, const Batch& batch, TeamNets& nets,
                     const AlgoConfig& cfg) {
  AgentNets& an = nets.agents[a];
  Mlp grads = zeros_like(an.critic);
  const double loss = critic_loss_grads(a, batch, nets, cfg, grads);
  adam_update(an.critic, grads, an.opt_critic, cfg.lr_critic);
  return loss;
}

double actor_objective_grads(int a, const Batch& batch, const TeamNets& nets,
                             const AlgoConfig& cfg, Mlp& mlp_grads,
                             LstmActor& lstm_grads) {
  const AgentNets& an = nets.agents[a];
  const int B = batch.size();
  OnlineActions oa = online_actions(a, batch, an);
  Matrix in = critic_input(cfg.algo, a, batch, false, &oa.act, nullptr);
  MlpCache ccache;
  Matrix q = mlp_forward(an.critic, in, &ccache);
  double objective = 0.0;
  Matrix dq(B, 1);
  for (int i = 0; i < B; ++i) {
    objective += q.at(i, 0);
    dq.at(i, 0) = -1.0 / B;  // descend the negated objective
  }
  objective /= B;
  Mlp scratch = zeros_like(an.critic);
  Matrix din = mlp_backward(an.critic, ccache, dq, scratch);
  Matrix dact =
      slice_cols(din, action_offset(cfg.algo, a, batch), oa.act.cols);
  actor_backprop(a, batch, an, oa, dact, mlp_grads, lstm_grads);
  return objective;
}

double actor_update(int a, const Batch& batch, TeamNets& nets,
                    const AlgoConfig& cfg) {
  AgentNets& an = nets.agents[a];
  Mlp mg = an.lstm ? Mlp{} : zeros_like(an.actor);
  LstmActor lg = an.lstm ? zeros_like(an.lactor) : LstmActor{};
  const double obj = actor_objective_grads(a, batch, nets, cfg, mg, lg);
  if (an.lstm) {
    adam_update(an.lactor, lg, an.opt_actor, cfg.lr_actor);
  } else {
    adam_update(an.actor, mg, an.opt_actor, cfg.lr_actor);
  }
  return obj;
}

double facmac_critic_loss_grads(const Batch& batch, const TeamNets& nets,
                                const AlgoConfig& cfg,
                                std::vector<Mlp>& critic_grads,
                                MixerNet& mixer_grads) {
  const int B = batch.size();
  const int n = nets.n_trained;
  // target local qs through the target mixer
  std::vector<Matrix> q_next(n);
  for (int a = 0; a < n; ++a) {
    Matrix tin = critic_input(AlgoId::Facmac, a, batch, true, nullptr, &nets);
    q_next[a] = mlp_forward(nets.agents[a].critic_target, tin);
  }
  // online local qs and per-sample mixing
  std::vector<Matrix> q(n);
  std::vector<MlpCache> caches(n);
  for (int a = 0; a < n; ++a) {
    Matrix in = critic_input(AlgoId::Facmac, a, batch, false, nullptr, nullptr);
    q[a] = mlp_forward(nets.agents[a].critic, in, &caches[a]);
  }
  double loss = 0.0;
  std::vector<Matrix> dq(n, Matrix(B, 1));
  std::vector<double> qrow(n), qnrow(n), dqrow(n);
  for (int i = 0; i < B; ++i) {
    for (int a = 0; a < n; ++a) {
      qrow[a] = q[a].at(i, 0);
      qnrow[a] = q_next[a].at(i, 0);
    }
    std::span<const double> s(batch.state.row(i),
                              static_cast<size_t>(batch.state.cols));
    std::span<const double> sn(batch.next_state.row(i),
                               static_cast<size_t>(batch.next_state.cols));
    const double qtot_next = mixer_forward(nets.mixer_target, sn, qnrow);
    const double y = td_target(team_reward(batch, n, i), qtot_next, cfg.gamma,
                               batch.terminal[i] != 0.0);
    MixerCache mcache;
    const double qtot = mixer_forward(nets.mixer, s, qrow, &mcache);
    const double err = qtot - y;
    loss += err * err;
    mixer_backward(nets.mixer, mcache, 2.0 * err / B, mixer_grads, dqrow);
    for (int a = 0; a < n; ++a) dq[a].at(i, 0) = dqrow[a];
  }
  loss /= B;
  for (int a = 0; a < n; ++a) {
    mlp_backward(nets.agents[a].critic, caches[a], dq[a], critic_grads[a]);
  }
  return loss;
}

double facmac_actor_objective_grads(const Batch& batch, const TeamNets& nets,
                                    const AlgoConfig& cfg,
                                    std::optional<int> simulate_as,
                                    std::vector<Mlp>& actor_grads) {
  const int B = batch.size();
  const int n = nets.n_trained;
  std::vector<OnlineActions> oa(n);
  std::vector<Matrix> q(n);
  std::vector<MlpCache> caches(n);
  for (int a = 0; a < n; ++a) {
    oa[a] = online_actions(a, batch, nets.agents[a]);
    const Mlp& critic = simulate_as ? nets.agents[*simulate_as].critic
                                    : nets.agents[a].critic;
    Matrix in = hconcat(batch.obs[a], oa[a].act);
    q[a] = mlp_forward(critic, in, &caches[a]);
  }
  double objective = 0.0;
  std::vector<double> qrow(n), dqrow(n);
  std::vector<Matrix> dq(n, Matrix(B, 1));
  MixerNet mixer_scratch = zeros_like(nets.mixer);
  for (int i = 0; i < B; ++i) {
    for (int a = 0; a < n; ++a) qrow[a] = q[a].at(i, 0);
    std::span<const double> s(batch.state.row(i),
                              static_cast<size_t>(batch.state.cols));
    MixerCache mcache;
    objective += mixer_forward(nets.mixer, s, qrow, &mcache);
    mixer_backward(nets.mixer, mcache, -1.0 / B, mixer_scratch, dqrow);
    for (int a = 0; a < n; ++a) dq[a].at(i, 0) = dqrow[a];
  }
  objective /= B;
  LstmActor lstm_unused;
  for (int a = 0; a < n; ++a) {
    if (simulate_as && a != *simulate_as) continue;
    const Mlp& critic = simulate_as ? nets.agents[*simulate_as].critic
                                    : nets.agents[a].critic;
    Mlp cscratch = zeros_like(critic);
    Matrix din = mlp_backward(critic, caches[a], dq[a], cscratch);
    Matrix dact = slice_cols(din, batch.obs[a].cols, oa[a].act.cols);
    actor_backprop(a, batch, nets.agents[a], oa[a], dact, actor_grads[a],
                   lstm_unused);
  }
  return objective;
}

double facmac_stage1_critic_grads(int a, const Batch& batch,
                                  const TeamNets& nets, const AlgoConfig& cfg,
                                  Mlp& critic_grads) {
  AlgoConfig local = cfg;
  local.algo = AlgoId::Iddpg;  // same local TD rule, no mixer
  return critic_loss_grads(a, batch, nets, local, critic_grads);
}

double facmac_stage1_actor_grads(int a, const Batch& batch,
                                 const TeamNets& nets, Mlp& actor_grads) {
  AlgoConfig local;
  local.algo = AlgoId::Iddpg;
  LstmActor unused;
  return actor_objective_grads(a, batch, nets, local, actor_grads, unused);
}

UpdateResult facmac_update(const Batch& batch, TeamNets& nets,
                           const AlgoConfig& cfg, std::int64_t timestep) {
  UpdateResult res;
  const int n = nets.n_trained;
  const bool stage1 = cfg.staged_watershed && timestep < *cfg.staged_watershed;
  if (stage1) {
    for (int a = 0; a < n; ++a) {
      Mlp cg = zeros_like(nets.agents[a].critic);
      res.critic_loss += facmac_stage1_critic_grads(a, batch, nets, cfg, cg);
      adam_update(nets.agents[a].critic, cg, nets.agents[a].opt_critic,
                  cfg.lr_critic);
    }
    for (int a = 0; a < n; ++a) {
      Mlp ag = zeros_like(nets.agents[a].actor);
      res.actor_objective += facmac_stage1_actor_grads(a, batch, nets, ag);
      adam_update(nets.agents[a].actor, ag, nets.agents[a].opt_actor,
                  cfg.lr_actor);
    }
  } else {
    std::vector<Mlp> cg;
    for (int a = 0; a < n; ++a) cg.push_back(zeros_like(nets.agents[a].critic));
    MixerNet mg = zeros_like(nets.mixer);
    res.critic_loss = facmac_critic_loss_grads(batch, nets, cfg, cg, mg);
    for (int a = 0; a < n; ++a) {
      adam_update(nets.agents[a].critic, cg[a], nets.agents[a].opt_critic,
                  cfg.lr_critic);
    }
    if (nets.mixer.kind != MixerKind::Vdn) {
      adam_update(nets.mixer, mg, nets.opt_mixer, cfg.lr_critic);
    }
    if (cfg.sharing == SharingMode::OwnCritics) {
      std::vector<Mlp> ag;
      for (int a = 0; a < n; ++a) {
        ag.push_back(zeros_like(nets.agents[a].actor));
      }
      res.actor_objective =
          facmac_actor_objective_grads(batch, nets, cfg, std::nullopt, ag);
      for (int a = 0; a < n; ++a) {
        adam_update(nets.agents[a].actor, ag[a], nets.agents[a].opt_actor,
                    cfg.lr_actor);
      }
    } else {
      for (int a = 0; a < n; ++a) {
        std::vector<Mlp> ag;
        for (int b = 0; b < n; ++b) {
          ag.push_back(zeros_like(nets.agents[b].actor));
        }
        res.actor_objective +=
            facmac_actor_objective_grads(batch, nets, cfg, a, ag);
        adam_update(nets.agents[a].actor, ag[a], nets.agents[a].opt_actor,
                    cfg.lr_actor);
      }
    }
  }
  // adversary policies (if any) train independently
  AlgoConfig adv = cfg;
  adv.algo = AlgoId::Iddpg;
  for (int a = n; a < static_cast<int>(nets.agents.size()); ++a) {
    res.critic_loss += critic_update(a, batch, nets, adv);
    res.actor_objective += actor_update(a, batch, nets, adv);
  }
  return res;
}

UpdateResult train_step_update(const Batch& batch, TeamNets& nets,
                               const AlgoConfig& cfg, std::int64_t timestep) {
  UpdateResult res;
  if (cfg.algo == AlgoId::Facmac) {
    res = facmac_update(batch, nets, cfg, timestep);
  } else {
    for (int a = 0; a < static_cast<int>(nets.agents.size()); ++a) {
      res.critic_loss += critic_update(a, batch, nets, cfg);
      res.actor_objective += actor_update(a, batch, nets, cfg);
    }
  }
  soft_update_targets(nets, cfg.tau);
  return res;
}

void soft_update_targets(TeamNets& nets, double tau) {
  for (auto& an : nets.agents) {
    if (an.lstm) {
      soft_update(an.lactor_target, an.lactor, tau);
    } else {
      soft_update(an.actor_target, an.actor, tau);
    }
    soft_update(an.critic_target, an.critic, tau);
  }
  if (nets.mixer.kind != MixerKind::Vdn && nets.mixer.n > 0) {
    soft_update(nets.mixer_target, nets.mixer, tau);
  }
}

Vec2 policy_action(const AgentNets& nets, const std::vector<double>& obs) {
  Matrix x(1, static_cast<int>(obs.size()));
  std::copy(obs.begin(), obs.end(), x.row(0));
  Matrix u = mlp_forward(nets.actor, x);
  return {u.at(0, 0), u.at(0, 1)};
}

Vec2 policy_action_window(const AgentNets& nets,
                          const std::vector<std::vector<double>>& window) {
  auto u = lstm_actor_forward(nets.lactor, window);
  return {u[0], u[1]};
}

}  // namespace marl
