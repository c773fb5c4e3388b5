#include "marl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>

#include "marl/buffers.hpp"
#include "marl/svgplot.hpp"

namespace marl {

namespace {

namespace fs = std::filesystem;

std::vector<std::vector<double>> all_observations(const WorldState& world,
                                                  const ScenarioSpec& spec) {
  std::vector<std::vector<double>> obs;
  obs.reserve(spec.n_policies());
  for (int p = 0; p < spec.n_policies(); ++p) {
    obs.push_back(observe(world, p, spec));
  }
  return obs;
}

// Per-agent execution history for the windowed actor: most recent
// seq_length observations including the current one, left-padded.
struct ObsHistory {
  std::size_t length;
  std::vector<std::deque<std::vector<double>>> per_agent;

  ObsHistory(int n, std::size_t len) : length(len), per_agent(n) {}

  void push(int agent, const std::vector<double>& obs) {
    auto& q = per_agent[agent];
    if (q.size() == length) q.pop_front();
    q.push_back(obs);
  }
  void reset() {
    for (auto& q : per_agent) q.clear();
  }
  std::vector<std::vector<double>> window(int agent) const {
    const auto& q = per_agent[agent];
    std::vector<std::vector<double>> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length - q.size(); ++i) out.push_back(q.front());
    for (const auto& o : q) out.push_back(o);
    return out;
  }
};

std::vector<Vec2> team_actions(const TeamNets& team, const ScenarioSpec& spec,
                               const std::vector<std::vector<double>>& obs,
                               const ObsHistory* history) {
  std::vector<Vec2> actions(spec.n_policies());
  for (int p = 0; p < spec.n_policies(); ++p) {
    if (team.agents[p].lstm) {
      actions[p] = policy_action_window(team.agents[p], history->window(p));
    } else {
      actions[p] = policy_action(team.agents[p], obs[p]);
    }
  }
  return actions;
}

double episode_rollout(const ScenarioSpec& spec,
                       const std::function<std::vector<Vec2>(
                           const std::vector<std::vector<double>>&)>& policy,
                       WorldState world, std::vector<double>* per_policy) {
  std::vector<double> totals(spec.n_policies(), 0.0);
  while (!is_terminal(world, spec)) {
    auto obs = all_observations(world, spec);
    auto actions = policy(obs);
    WorldState next = step_world(world, actions, spec.world_cfg, spec.specs);
    auto r = reward(world, actions, next, spec);
    for (int p = 0; p < spec.n_policies(); ++p) totals[p] += r[p];
    world = std::move(next);
  }
  if (per_policy) *per_policy = totals;
  double mean = 0.0;
  for (int a = 0; a < spec.n_agents; ++a) mean += totals[a];
  return mean / spec.n_agents;
}

std::map<std::string, std::string> run_metadata(const RunConfig& cfg,
                                                std::int64_t timestep) {
  return {{"scenario", cfg.scenario},
          {"algo", cfg.algo},
          {"mixer", cfg.mixer},
          {"sharing", cfg.sharing},
          {"staged-watershed", cfg.staged_watershed
                                   ? std::to_string(*cfg.staged_watershed)
                                   : ""},
          {"seed", std::to_string(cfg.seed)},
          {"timestep", std::to_string(timestep)}};
}

TeamNets build_team_for(const RunConfig& cfg, const ScenarioSpec& spec) {
  AlgoConfig algo = cfg.algo_config();
  std::vector<int> obs_dims;
  for (int p = 0; p < spec.n_policies(); ++p) {
    obs_dims.push_back(obs_dim(spec, p));
  }
  int state_dim = 0;
  for (int d : obs_dims) state_dim += d;
  Rng init = Rng::substream(cfg.seed, "init");
  return make_team(algo, obs_dims, spec.n_agents, state_dim, 2, init);
}

}  // namespace

double trained_mean(const std::vector<double>& per_policy, int n_trained) {
  double m = 0.0;
  for (int a = 0; a < n_trained; ++a) m += per_policy[a];
  return m / n_trained;
}

std::vector<double> evaluate_team(const TeamNets& team,
                                  const ScenarioSpec& spec,
                                  const AlgoConfig& algo, int episodes,
                                  Rng rng) {
  std::vector<double> means(spec.n_policies(), 0.0);
  for (int ep = 0; ep < episodes; ++ep) {
    WorldState world = reset_world(spec, rng, ep);
    ObsHistory history(spec.n_policies(), algo.seq_length);
    std::vector<double> totals;
    auto policy = [&](const std::vector<std::vector<double>>& obs) {
      for (int p = 0; p < spec.n_policies(); ++p) history.push(p, obs[p]);
      return team_actions(team, spec, obs, &history);
    };
    episode_rollout(spec, policy, world, &totals);
    for (int p = 0; p < spec.n_policies(); ++p) means[p] += totals[p];
  }
  for (double& m : means) m /= episodes;
  return means;
}

double random_policy_return(const ScenarioSpec& spec, int episodes, Rng rng) {
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    WorldState world = reset_world(spec, rng, ep);
    auto policy = [&](const std::vector<std::vector<double>>&) {
      std::vector<Vec2> a(spec.n_policies());
      for (auto& v : a) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      return a;
    };
    total += episode_rollout(spec, policy, world, nullptr);
  }
  return total / episodes;
}

double stationary_policy_return(const ScenarioSpec& spec, int episodes,
                                Rng rng) {
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    WorldState world = reset_world(spec, rng, ep);
    auto policy = [&](const std::vector<std::vector<double>>&) {
      return std::vector<Vec2>(spec.n_policies(), Vec2{});
    };
    total += episode_rollout(spec, policy, world, nullptr);
  }
  return total / episodes;
}

RunArtifacts train(const RunConfig& cfg) {
  cfg.validate();
  const auto [base, n_agents] = cfg.scenario_base();
  ScenarioSpec spec = make_scenario_spec(base, n_agents);
  spec.max_episode_len = cfg.max_episode_len;
  if (cfg.num_adversaries != spec.n_adversaries) {
    throw ConfigError("Num-adversaries must be " +
                      std::to_string(spec.n_adversaries) + " for " +
                      cfg.scenario);
  }
  const AlgoConfig algo = cfg.algo_config();
  const bool lstm = algo.algo == AlgoId::MaddpgLstm;

  fs::create_directories(cfg.out_dir);
  RunArtifacts art;
  art.out_dir = cfg.out_dir;
  art.metrics_path = (fs::path(cfg.out_dir) / "metrics.csv").string();
  art.checkpoint_path = (fs::path(cfg.out_dir) / "checkpoint.bin").string();
  art.config_path = (fs::path(cfg.out_dir) / "config.resolved").string();
  art.svg_path = (fs::path(cfg.out_dir) / "curves.svg").string();
  {
    std::ofstream c(art.config_path);
    c << serialize_config(cfg);
  }

  TeamNets team = build_team_for(cfg, spec);
  Rng env_rng = Rng::substream(cfg.seed, "env");
  Rng explore_rng = Rng::substream(cfg.seed, "explore");
  Rng sample_rng = Rng::substream(cfg.seed, "sample");

  ReplayBuffer<Transition> replay(cfg.replay_capacity);
  ReplayBuffer<SequenceWindow> seq_replay(cfg.replay_capacity);
  SequenceWindow seq(static_cast<std::size_t>(algo.seq_length));
  ObsHistory history(spec.n_policies(), algo.seq_length);

  WorldState world = reset_world(spec, env_rng, 0);
  std::int64_t episode = 0;

  std::vector<MetricsRow> rows;
  std::ofstream timing((fs::path(cfg.out_dir) / "timing.csv").string());
  timing << "timestep,wall_clock_s\n";
  const auto t_start = std::chrono::steady_clock::now();

  // Exploration anneals from the configured rates down to a 0.05 floor at
  // 5e-7 per step, so late-training replay data is closer to on-policy.
  auto annealed = [](double start, std::int64_t t) {
    return std::max(std::min(start, 0.05),
                    start - 5e-7 * static_cast<double>(t));
  };
  for (std::int64_t t = 1; t <= cfg.time_steps; ++t) {
    auto obs = all_observations(world, spec);
    for (int p = 0; p < spec.n_policies(); ++p) history.push(p, obs[p]);
    auto greedy = team_actions(team, spec, obs, &history);
    std::vector<Vec2> actions(spec.n_policies());
    const double eps = annealed(cfg.epsilon, t);
    const double nr = annealed(cfg.noise_rate, t);
    for (int p = 0; p < spec.n_policies(); ++p) {
      actions[p] = explore(greedy[p], explore_rng, eps, nr);
    }
    WorldState next = step_world(world, actions, spec.world_cfg, spec.specs);
    auto rewards = reward(world, actions, next, spec);
    const bool terminal = is_terminal(next, spec);

    Transition tr;
    tr.state = global_state(world, spec);
    tr.next_state = global_state(next, spec);
    tr.obs = obs;
    tr.next_obs = all_observations(next, spec);
    tr.actions.resize(spec.n_policies());
    for (int p = 0; p < spec.n_policies(); ++p) {
      tr.actions[p] = {actions[p].x, actions[p].y};
    }
    tr.rewards = rewards;
    tr.terminal = terminal;
    tr.step_index = world.step_index;
    tr.episode_index = episode;
    if (lstm) {
      seq.push(std::move(tr));
      seq_replay.push(seq);
    } else {
      replay.push(std::move(tr));
    }

    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    bool updated = false;
    try {
      if (lstm) {
        if (auto sample = seq_replay.sample(batch, sample_rng)) {
          Batch b = batch_from_windows(*sample);
          auto res = train_step_update(b, team, algo, t);
          if (!std::isfinite(res.critic_loss)) {
            throw NumericError("non-finite critic loss");
          }
          updated = true;
        }
      } else {
        if (auto sample = replay.sample(batch, sample_rng)) {
          Batch b = batch_from_transitions(*sample);
          auto res = train_step_update(b, team, algo, t);
          if (!std::isfinite(res.critic_loss)) {
            throw NumericError("non-finite critic loss");
          }
          updated = true;
        }
      }
    } catch (const NumericError&) {
      // diagnostic snapshot, then abort
      save_checkpoint(checkpoint_from_team(team, run_metadata(cfg, t)),
                      (fs::path(cfg.out_dir) / "diagnostic.bin").string());
      throw;
    }
    if (updated) ++art.updates;

    world = std::move(next);
    if (terminal) {
      ++episode;
      world = reset_world(spec, env_rng, episode);
      seq.reset();
      history.reset();
    }

    if (t % cfg.eval_every == 0) {
      Rng eval_rng = Rng::substream(cfg.seed, "eval", static_cast<std::uint64_t>(t));
      auto per_policy =
          evaluate_team(team, spec, algo, cfg.eval_episodes, eval_rng);
      MetricsRow row;
      row.timestep = t;
      row.episode = episode;
      row.agent_returns = per_policy;
      row.mean_return = trained_mean(per_policy, spec.n_agents);
      rows.push_back(std::move(row));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_start)
              .count();
      timing << t << "," << secs << "\n";
    }
  }
  art.episodes = episode;

  {
    std::ofstream m(art.metrics_path);
    m << metrics_header(spec.n_agents, spec.n_adversaries) << "\n";
    for (const auto& row : rows) {
      m << format_metrics_row(row, spec.n_agents) << "\n";
    }
  }
  save_checkpoint(checkpoint_from_team(team, run_metadata(cfg, cfg.time_steps)),
                  art.checkpoint_path);
  {
    Curve c;
    c.label = cfg.algo + " (" + cfg.scenario + ")";
    for (const auto& row : rows) {
      c.x.push_back(static_cast<double>(row.timestep));
      c.y.push_back(row.mean_return);
    }
    std::ofstream svg(art.svg_path);
    svg << render_svg({c});
  }
  return art;
}

std::vector<double> evaluate_checkpoint(const std::string& checkpoint_path,
                                        const std::string& scenario,
                                        int episodes, std::uint64_t seed) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  auto meta_scenario = ckpt.metadata.find("scenario");
  const std::string scen =
      scenario.empty()
          ? (meta_scenario == ckpt.metadata.end() ? "" : meta_scenario->second)
          : scenario;
  if (scen.empty()) throw CheckpointError("checkpoint lacks scenario metadata");
  RunConfig cfg = preset_for_scenario(scen);
  if (auto it = ckpt.metadata.find("algo"); it != ckpt.metadata.end()) {
    cfg.algo = it->second;
  }
  if (auto it = ckpt.metadata.find("mixer"); it != ckpt.metadata.end()) {
    cfg.mixer = it->second;
  }
  cfg.seed = seed;
  const auto [base, n_agents] = cfg.scenario_base();
  ScenarioSpec spec = make_scenario_spec(base, n_agents);
  TeamNets team = build_team_for(cfg, spec);
  team_from_checkpoint(ckpt, team);
  Rng rng = Rng::substream(seed, "eval", 0);
  return evaluate_team(team, spec, cfg.algo_config(), episodes, rng);
}

}  // namespace marl
