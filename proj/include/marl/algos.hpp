#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marl/buffers.hpp"
#include "marl/mixer.hpp"
#include "marl/nn.hpp"

namespace marl {

enum class AlgoId { Iddpg, Maddpg, MaddpgLstm, MaddpgL, Facmac };

AlgoId algo_from_string(const std::string& s);
std::string to_string(AlgoId a);

enum class SharingMode { OwnCritics, SimulateWithOwn };

SharingMode sharing_from_string(const std::string& s);
std::string to_string(SharingMode m);

struct AlgoConfig {
  AlgoId algo = AlgoId::Maddpg;
  double gamma = 0.95;
  double lr_actor = 0.001;
  double lr_critic = 0.01;
  int batch_size = 256;
  int seq_length = 5;
  double tau = 0.01;
  MixerKind mixer = MixerKind::Nonmonotonic;
  SharingMode sharing = SharingMode::OwnCritics;
  std::optional<std::int64_t> staged_watershed;
  int hidden = 64;
  int mixer_embed = 32;
};

// One policy's networks: online actor/critic, target copies, Adam states.
struct AgentNets {
  bool lstm = false;
  Mlp actor, actor_target;
  LstmActor lactor, lactor_target;
  Mlp critic, critic_target;
  AdamState opt_actor, opt_critic;
};

struct TeamNets {
  std::vector<AgentNets> agents;  // per policy; trained team first
  int n_trained = 0;
  MixerNet mixer, mixer_target;  // facmac only
  AdamState opt_mixer;
};

// Critic input width per update rule.
int critic_input_dim(AlgoId algo, int n_policies, int state_dim, int d_obs,
                     int act_dim);

TeamNets make_team(const AlgoConfig& cfg, const std::vector<int>& obs_dims,
                   int n_trained, int state_dim, int act_dim, Rng& rng);

// Uniform minibatch in struct-of-arrays form. For the LSTM variant the
// scalar fields come from each window's final transition and the *_win
// fields carry the padded per-agent observation sequences.
struct Batch {
  int n = 0;  // policies
  Matrix state, next_state;
  std::vector<Matrix> obs, next_obs;
  std::vector<Matrix> act;
  Matrix rewards;  // B x n
  std::vector<double> terminal;
  std::vector<std::vector<std::vector<std::vector<double>>>> obs_win,
      next_obs_win;  // [policy][sample][t][dim]

  int size() const { return state.rows; }
};

Batch batch_from_transitions(const std::vector<const Transition*>& sample);
Batch batch_from_windows(const std::vector<const SequenceWindow*>& sample);

// y = r + gamma * next_value * (1 - terminal)
double td_target(double reward, double next_value, double gamma,
                 bool terminal);

// ---- per-agent update rules (Adam-free gradient evaluators feed both the
// updates and the finite-difference checks) ----

double critic_loss_grads(int a, const Batch& batch, const TeamNets& nets,
                         const AlgoConfig& cfg, Mlp& grads);
double critic_update(int a, const Batch& batch, TeamNets& nets,
                     const AlgoConfig& cfg);

// Mean critic value with agent a's action recomputed online; grads are of
// the *negated* objective (descent-ready).
double actor_objective_grads(int a, const Batch& batch, const TeamNets& nets,
                             const AlgoConfig& cfg, Mlp& mlp_grads,
                             LstmActor& lstm_grads);
double actor_update(int a, const Batch& batch, TeamNets& nets,
                    const AlgoConfig& cfg);

// ---- FACMAC ----

// Joint TD loss over the trained team; throws on unequal team rewards.
double facmac_critic_loss_grads(const Batch& batch, const TeamNets& nets,
                                const AlgoConfig& cfg,
                                std::vector<Mlp>& critic_grads,
                                MixerNet& mixer_grads);
// Centralized objective with every team action recomputed online.
// When `simulate_as` is set, every local critic is evaluated with that
// agent's critic parameters and only that agent's actor gradient is filled.
double facmac_actor_objective_grads(const Batch& batch, const TeamNets& nets,
                                    const AlgoConfig& cfg,
                                    std::optional<int> simulate_as,
                                    std::vector<Mlp>& actor_grads);
// Stage-1 objective for one agent: mean local Q_a(tau_a, mu_a(tau_a)).
double facmac_stage1_actor_grads(int a, const Batch& batch,
                                 const TeamNets& nets, Mlp& actor_grads);
double facmac_stage1_critic_grads(int a, const Batch& batch,
                                  const TeamNets& nets, const AlgoConfig& cfg,
                                  Mlp& critic_grads);

struct UpdateResult {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

// Full FACMAC training step (staged dispatch included; adversary policies,
// when present, are updated with the independent DDPG rule).
UpdateResult facmac_update(const Batch& batch, TeamNets& nets,
                           const AlgoConfig& cfg, std::int64_t timestep);

// One training step for any algorithm: critic then actor per policy in index
// order, then soft target updates.
UpdateResult train_step_update(const Batch& batch, TeamNets& nets,
                               const AlgoConfig& cfg, std::int64_t timestep);

void soft_update_targets(TeamNets& nets, double tau);

// Deterministic action of policy a given its observation (and window for the
// LSTM variant).
Vec2 policy_action(const AgentNets& nets, const std::vector<double>& obs);
Vec2 policy_action_window(const AgentNets& nets,
                          const std::vector<std::vector<double>>& window);

}  // namespace marl
