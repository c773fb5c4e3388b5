#include "marl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "marl/buffers.hpp"
#include "marl/config.hpp"
#include "marl/gradcheck.hpp"
#include "marl/trainer.hpp"

namespace marl::verify {

namespace {

constexpr double kGradTol = 1e-4;
constexpr double kFdStep = 1e-5;

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.a) v = rng.uniform(-1.0, 1.0);
  return m;
}

std::vector<std::vector<double>> random_window(int len, int dim, Rng& rng) {
  std::vector<std::vector<double>> w(len);
  for (auto& row : w) {
    row.resize(dim);
    for (double& v : row) v = rng.uniform(-1.0, 1.0);
  }
  return w;
}

CheckResult graded(const std::string& name, double measured, double threshold,
                   bool pass_below = true) {
  CheckResult r;
  r.name = name;
  r.measured = measured;
  r.threshold = threshold;
  r.pass = pass_below ? measured < threshold : measured >= threshold;
  return r;
}

using LossFn = std::function<double(const std::vector<double>&)>;

CheckResult check_loss_grad(const std::string& name, const LossFn& f,
                            const std::vector<double>& params,
                            const std::vector<double>& analytic, int probes,
                            Rng& rng) {
  const double err = grad_check(f, params, analytic, probes, kFdStep, rng);
  return graded(name, err, kGradTol);
}

}  // namespace

SynthProblem make_synth(AlgoId algo, MixerKind mixer, int n, int batch_size,
                        int hidden, std::uint64_t seed) {
  SynthProblem p;
  p.cfg.algo = algo;
  p.cfg.mixer = mixer;
  p.cfg.hidden = hidden;
  p.cfg.mixer_embed = 8;
  p.cfg.seq_length = 5;
  Rng rng(seed);
  const int d_obs = 6;
  std::vector<int> obs_dims(n, d_obs);
  const int state_dim = n * d_obs;
  p.team = make_team(p.cfg, obs_dims, n, state_dim, 2, rng);
  Batch& b = p.batch;
  b.n = n;
  b.obs.resize(n);
  b.next_obs.resize(n);
  b.act.resize(n);
  for (int a = 0; a < n; ++a) {
    b.obs[a] = random_matrix(batch_size, d_obs, rng);
    b.next_obs[a] = random_matrix(batch_size, d_obs, rng);
    b.act[a] = random_matrix(batch_size, 2, rng);
  }
  // s is the concatenation of the per-agent observations
  b.state = b.obs[0];
  b.next_state = b.next_obs[0];
  for (int a = 1; a < n; ++a) {
    b.state = hconcat(b.state, b.obs[a]);
    b.next_state = hconcat(b.next_state, b.next_obs[a]);
  }
  b.rewards = random_matrix(batch_size, n, rng);
  if (algo == AlgoId::Facmac) {
    // shared team reward
    for (int i = 0; i < batch_size; ++i) {
      for (int a = 1; a < n; ++a) b.rewards.at(i, a) = b.rewards.at(i, 0);
    }
  }
  b.terminal.assign(batch_size, 0.0);
  for (int i = 0; i < batch_size; i += 3) b.terminal[i] = 1.0;
  if (algo == AlgoId::MaddpgLstm) {
    b.obs_win.resize(n);
    b.next_obs_win.resize(n);
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < batch_size; ++i) {
        b.obs_win[a].push_back(random_window(p.cfg.seq_length, d_obs, rng));
        b.next_obs_win[a].push_back(
            random_window(p.cfg.seq_length, d_obs, rng));
      }
    }
  }
  return p;
}

std::vector<CheckResult> grad_fidelity(int probes_per_loss,
                                       std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng probe_rng(splitmix64(seed ^ 0x9e37ULL));
  const int B = 5;
  const int H = 16;

  {  // raw MLP backward against finite differences
    Rng rng(seed + 1);
    Mlp net = make_mlp({8, H, H, 3}, Act::Tanh, rng);
    Matrix x = random_matrix(B, 8, rng);
    Matrix w = random_matrix(B, 3, rng);
    auto loss = [&](const Mlp& m) {
      Matrix y = mlp_forward(m, x);
      double s = 0.0;
      for (std::size_t k = 0; k < y.a.size(); ++k) s += y.a[k] * w.a[k];
      return s;
    };
    MlpCache cache;
    Matrix y = mlp_forward(net, x, &cache);
    Mlp grads = zeros_like(net);
    mlp_backward(net, cache, w, grads);
    auto f = [&](const std::vector<double>& flat) {
      Mlp m = net;
      from_flat(std::span<const double>(flat), m);
      return loss(m);
    };
    out.push_back(check_loss_grad("mlp-backward", f, to_flat(net),
                                  to_flat(grads), probes_per_loss, probe_rng));
  }
  {  // LSTM actor through a 5-step unroll
    Rng rng(seed + 2);
    LstmActor net = make_lstm_actor(6, 8, 8, 2, rng);
    auto win = random_window(5, 6, rng);
    std::vector<double> w = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    LstmActorCache cache;
    auto u = lstm_actor_forward(net, win, &cache);
    (void)u;
    LstmActor grads = zeros_like(net);
    lstm_actor_backward(net, cache, w, grads);
    auto f = [&](const std::vector<double>& flat) {
      LstmActor m = net;
      from_flat(std::span<const double>(flat), m);
      auto y = lstm_actor_forward(m, win);
      return y[0] * w[0] + y[1] * w[1];
    };
    out.push_back(check_loss_grad("lstm-unroll", f, to_flat(net),
                                  to_flat(grads), probes_per_loss, probe_rng));
  }

  struct PerAgentLoss {
    std::string name;
    AlgoId algo;
    bool actor;  // actor objective vs critic loss
  };
  const std::vector<PerAgentLoss> losses = {
      {"maddpg-critic-loss", AlgoId::Maddpg, false},
      {"maddpg-actor-objective", AlgoId::Maddpg, true},
      {"iddpg-critic-loss", AlgoId::Iddpg, false},
      {"iddpg-actor-objective", AlgoId::Iddpg, true},
      {"maddpg-l-critic-loss", AlgoId::MaddpgL, false},
      {"maddpg-l-actor-objective", AlgoId::MaddpgL, true},
      {"lstm-actor-critic-loss", AlgoId::MaddpgLstm, false},
      {"lstm-actor-objective", AlgoId::MaddpgLstm, true},
  };
  for (const auto& loss : losses) {
    SynthProblem p =
        make_synth(loss.algo, MixerKind::Nonmonotonic, 3, B, H, seed + 10);
    const int a = 1;
    const bool lstm = loss.algo == AlgoId::MaddpgLstm;
    if (!loss.actor) {
      Mlp grads = zeros_like(p.team.agents[a].critic);
      critic_loss_grads(a, p.batch, p.team, p.cfg, grads);
      auto f = [&](const std::vector<double>& flat) {
        TeamNets t = p.team;
        from_flat(std::span<const double>(flat), t.agents[a].critic);
        Mlp g = zeros_like(t.agents[a].critic);
        return critic_loss_grads(a, p.batch, t, p.cfg, g);
      };
      out.push_back(check_loss_grad(loss.name, f,
                                    to_flat(p.team.agents[a].critic),
                                    to_flat(grads), probes_per_loss,
                                    probe_rng));
    } else if (!lstm) {
      Mlp grads = zeros_like(p.team.agents[a].actor);
      LstmActor lg;
      actor_objective_grads(a, p.batch, p.team, p.cfg, grads, lg);
      auto f = [&](const std::vector<double>& flat) {
        TeamNets t = p.team;
        from_flat(std::span<const double>(flat), t.agents[a].actor);
        Mlp g = zeros_like(t.agents[a].actor);
        LstmActor lgs;
        return -actor_objective_grads(a, p.batch, t, p.cfg, g, lgs);
      };
      out.push_back(check_loss_grad(loss.name, f,
                                    to_flat(p.team.agents[a].actor),
                                    to_flat(grads), probes_per_loss,
                                    probe_rng));
    } else {
      LstmActor grads = zeros_like(p.team.agents[a].lactor);
      Mlp mg;
      actor_objective_grads(a, p.batch, p.team, p.cfg, mg, grads);
      auto f = [&](const std::vector<double>& flat) {
        TeamNets t = p.team;
        from_flat(std::span<const double>(flat), t.agents[a].lactor);
        Mlp mgs;
        LstmActor g = zeros_like(t.agents[a].lactor);
        return -actor_objective_grads(a, p.batch, t, p.cfg, mgs, g);
      };
      out.push_back(check_loss_grad(loss.name, f,
                                    to_flat(p.team.agents[a].lactor),
                                    to_flat(grads), probes_per_loss,
                                    probe_rng));
    }
  }

  // FACMAC joint TD loss (Eq-8 style) for each mixer kind, gradient w.r.t.
  // all local critics plus the mixer jointly.
  for (MixerKind kind :
       {MixerKind::Vdn, MixerKind::Monotonic, MixerKind::Nonmonotonic}) {
    SynthProblem p = make_synth(AlgoId::Facmac, kind, 3, B, H, seed + 20);
    const int n = p.team.n_trained;
    std::vector<Mlp> cg;
    for (int a = 0; a < n; ++a) cg.push_back(zeros_like(p.team.agents[a].critic));
    MixerNet mg = zeros_like(p.team.mixer);
    facmac_critic_loss_grads(p.batch, p.team, p.cfg, cg, mg);
    std::vector<double> flat, analytic;
    for (int a = 0; a < n; ++a) {
      flatten(p.team.agents[a].critic, flat);
      flatten(cg[a], analytic);
    }
    flatten(p.team.mixer, flat);
    flatten(mg, analytic);
    auto f = [&](const std::vector<double>& v) {
      TeamNets t = p.team;
      std::size_t off = 0;
      for (int a = 0; a < n; ++a) {
        unflatten(std::span<const double>(v), off, t.agents[a].critic);
      }
      unflatten(std::span<const double>(v), off, t.mixer);
      std::vector<Mlp> g;
      for (int a = 0; a < n; ++a) g.push_back(zeros_like(t.agents[a].critic));
      MixerNet mgs = zeros_like(t.mixer);
      return facmac_critic_loss_grads(p.batch, t, p.cfg, g, mgs);
    };
    out.push_back(check_loss_grad("facmac-critic-loss-" + to_string(kind), f,
                                  flat, analytic, probes_per_loss, probe_rng));
  }
  {  // FACMAC centralized policy gradient (Eq-9 style), all actors jointly
    SynthProblem p =
        make_synth(AlgoId::Facmac, MixerKind::Nonmonotonic, 3, B, H, seed + 30);
    const int n = p.team.n_trained;
    std::vector<Mlp> ag;
    for (int a = 0; a < n; ++a) ag.push_back(zeros_like(p.team.agents[a].actor));
    facmac_actor_objective_grads(p.batch, p.team, p.cfg, std::nullopt, ag);
    std::vector<double> flat, analytic;
    for (int a = 0; a < n; ++a) {
      flatten(p.team.agents[a].actor, flat);
      flatten(ag[a], analytic);
    }
    auto f = [&](const std::vector<double>& v) {
      TeamNets t = p.team;
      std::size_t off = 0;
      for (int a = 0; a < n; ++a) {
        unflatten(std::span<const double>(v), off, t.agents[a].actor);
      }
      std::vector<Mlp> g;
      for (int a = 0; a < n; ++a) g.push_back(zeros_like(t.agents[a].actor));
      return -facmac_actor_objective_grads(p.batch, t, p.cfg, std::nullopt, g);
    };
    out.push_back(check_loss_grad("facmac-actor-objective", f, flat, analytic,
                                  probes_per_loss, probe_rng));
  }
  {  // staged FACMAC stage-1 actor objective (local critic only)
    SynthProblem p =
        make_synth(AlgoId::Facmac, MixerKind::Nonmonotonic, 3, B, H, seed + 40);
    const int a = 0;
    Mlp grads = zeros_like(p.team.agents[a].actor);
    facmac_stage1_actor_grads(a, p.batch, p.team, grads);
    auto f = [&](const std::vector<double>& v) {
      TeamNets t = p.team;
      from_flat(std::span<const double>(v), t.agents[a].actor);
      Mlp g = zeros_like(t.agents[a].actor);
      return -facmac_stage1_actor_grads(a, p.batch, t, g);
    };
    out.push_back(check_loss_grad("facmac-stage1-actor-objective", f,
                                  to_flat(p.team.agents[a].actor),
                                  to_flat(grads), probes_per_loss, probe_rng));
  }
  return out;
}

std::vector<CheckResult> mixer_laws(int samples, std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  {  // VDN exact sum + linearity
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const int n = 1 + static_cast<int>(rng.randint(5));
      std::vector<double> q(n), q2(n);
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        q[i] = rng.uniform(-10.0, 10.0);
        q2[i] = rng.uniform(-10.0, 10.0);
        sum += q[i];
      }
      worst = std::max(worst, std::abs(mixer_vdn(q) - sum));
      const double alpha = rng.uniform(-3.0, 3.0);
      std::vector<double> qa(n), qs(n);
      for (int i = 0; i < n; ++i) {
        qa[i] = alpha * q[i];
        qs[i] = q[i] + q2[i];
      }
      worst = std::max(worst,
                       std::abs(mixer_vdn(qa) - alpha * mixer_vdn(q)) +
                           std::abs(mixer_vdn(qs) -
                                    (mixer_vdn(q) + mixer_vdn(q2))));
    }
    out.push_back(graded("vdn-linearity", worst, 1e-9));
  }
  {  // monotonic mixer: finite-difference partials never below -1e-9
    double min_partial = std::numeric_limits<double>::infinity();
    const int n = 3, S = 6, E = 8;
    for (int s = 0; s < samples; ++s) {
      Rng init(splitmix64(seed + s));
      MixerNet mix = make_mixer(MixerKind::Monotonic, n, S, E, init);
      std::vector<double> st(S), q(n);
      for (double& v : st) v = rng.uniform(-1.0, 1.0);
      for (double& v : q) v = rng.uniform(-3.0, 3.0);
      const int a = static_cast<int>(rng.randint(n));
      const double h = 1e-6;
      std::vector<double> qp = q, qm = q;
      qp[a] += h;
      qm[a] -= h;
      const double partial =
          (mixer_forward(mix, st, qp) - mixer_forward(mix, st, qm)) /
          (2.0 * h);
      min_partial = std::min(min_partial, partial);
    }
    out.push_back(graded("monotonic-partials", min_partial, -1e-9, false));
  }
  {  // nonmonotonic mixer can represent a decreasing dependence
    Rng init(seed + 7);
    MixerNet mix = make_mixer(MixerKind::Nonmonotonic, 2, 4, 4, init);
    // force a negative effective weight for q0 regardless of state
    mix.hyper_w1.W.zero();
    for (auto& b : mix.hyper_w1.b) b = 0.0;
    mix.hyper_w1.b[0] = -2.0;  // w1[q0 -> embed0] = -2
    mix.hyper_w2.W.zero();
    for (auto& b : mix.hyper_w2.b) b = 0.0;
    mix.hyper_w2.b[0] = 1.0;
    std::vector<double> st = {0.1, -0.2, 0.3, 0.0};
    std::vector<double> qlo = {1.0, 0.5}, qhi = {2.0, 0.5};
    const double drop = mixer_forward(mix, st, qlo) - mixer_forward(mix, st, qhi);
    out.push_back(graded("nonmonotonic-can-decrease", drop, 0.0, false));
  }
  return out;
}

std::vector<CheckResult> buffer_semantics(int programs, std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  int ring_failures = 0;
  for (int prog = 0; prog < programs; ++prog) {
    const std::size_t cap = 1 + rng.randint(8);
    ReplayBuffer<int> ring(cap);
    std::deque<int> reference;
    const int ops = 5 + static_cast<int>(rng.randint(60));
    for (int op = 0; op < ops; ++op) {
      const int v = static_cast<int>(rng.randint(1'000'000));
      ring.push(v);
      reference.push_back(v);
      if (reference.size() > cap) reference.pop_front();
      if (ring.size() != reference.size()) ++ring_failures;
    }
    std::vector<int> got, want(reference.begin(), reference.end());
    for (std::size_t i = 0; i < ring.size(); ++i) got.push_back(ring.at(i));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) ++ring_failures;
  }
  out.push_back(graded("replay-ring-vs-reference", ring_failures, 1.0));

  int seq_failures = 0;
  for (int prog = 0; prog < programs; ++prog) {
    const std::size_t len = 1 + rng.randint(6);
    SequenceWindow seq(len);
    std::deque<std::int64_t> reference;
    std::int64_t step = 0, episode = 0;
    const int ops = 5 + static_cast<int>(rng.randint(60));
    for (int op = 0; op < ops; ++op) {
      if (rng.uniform() < 0.15) {
        seq.reset();
        reference.clear();
        ++episode;
        step = 0;
        continue;
      }
      Transition t;
      t.step_index = step++;
      t.episode_index = episode;
      t.obs = {{0.0}};
      t.next_obs = {{0.0}};
      seq.push(t);
      reference.push_back(t.step_index);
      if (reference.size() > len) reference.pop_front();
      if (seq.size() != reference.size()) ++seq_failures;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq.at(i).step_index != reference[i]) ++seq_failures;
        if (seq.at(i).episode_index != episode) ++seq_failures;
        if (i > 0 && seq.at(i).step_index != seq.at(i - 1).step_index + 1) {
          ++seq_failures;  // windows must be time-contiguous
        }
      }
    }
  }
  out.push_back(graded("sequence-window-vs-reference", seq_failures, 1.0));

  // left-padding never mixes observations across a reset
  int pad_failures = 0;
  {
    SequenceWindow seq(5);
    Transition t;
    t.obs = {{42.0}};
    t.next_obs = {{43.0}};
    t.step_index = 0;
    t.episode_index = 7;
    seq.push(t);
    auto win = observation_window(seq, 0);
    for (const auto& o : win) {
      if (o != std::vector<double>{42.0}) ++pad_failures;
    }
    seq.reset();
    Transition t2 = t;
    t2.obs = {{99.0}};
    t2.episode_index = 8;
    seq.push(t2);
    for (const auto& o : observation_window(seq, 0)) {
      if (o != std::vector<double>{99.0}) ++pad_failures;
    }
  }
  out.push_back(graded("window-padding-within-episode", pad_failures, 1.0));
  return out;
}

std::vector<double> reward_bruteforce(const WorldState& world,
                                      const ScenarioSpec& spec) {
  const int n = spec.n_entities();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double dx = world.positions[i].x - world.positions[j].x;
      const double dy = world.positions[i].y - world.positions[j].y;
      D[i][j] = std::sqrt(dx * dx + dy * dy);
    }
  }
  auto collides = [&](int i, int j) {
    return D[i][j] < spec.specs[i].radius + spec.specs[j].radius;
  };
  std::vector<double> r(spec.n_policies(), 0.0);
  const double pen = spec.reward_params.collision_penalty;
  if (spec.kind == ScenarioKind::Spread || spec.kind == ScenarioKind::Tunnel) {
    double total = 0.0;
    for (int l = 0; l < spec.n_landmarks; ++l) {
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < spec.n_agents; ++a) {
        best = std::min(best, D[spec.landmark_entity(l)][spec.agent_entity(a)]);
      }
      total -= best;
    }
    int count = 0;
    for (int a = 0; a < spec.n_agents; ++a) {
      for (int b = a + 1; b < spec.n_agents; ++b) {
        if (collides(spec.agent_entity(a), spec.agent_entity(b))) ++count;
      }
      for (int o = 0; o < spec.n_obstacles; ++o) {
        if (collides(spec.agent_entity(a), spec.obstacle_entity(o))) ++count;
      }
    }
    total -= pen * count;
    std::fill(r.begin(), r.end(), total);
  } else if (spec.kind == ScenarioKind::SimpleTunnel) {
    for (int a = 0; a < spec.n_agents; ++a) {
      double ra = -D[spec.agent_entity(a)][spec.landmark_entity(a)];
      int count = 0;
      for (int b = 0; b < spec.n_agents; ++b) {
        if (b != a && collides(spec.agent_entity(a), spec.agent_entity(b))) {
          ++count;
        }
      }
      for (int o = 0; o < spec.n_obstacles; ++o) {
        if (collides(spec.agent_entity(a), spec.obstacle_entity(o))) ++count;
      }
      r[a] = ra - pen * count;
    }
  } else {
    const int prey = spec.adversary_entity(0);
    double mind = std::numeric_limits<double>::infinity();
    int captures = 0;
    for (int a = 0; a < spec.n_agents; ++a) {
      mind = std::min(mind, D[spec.agent_entity(a)][prey]);
      if (collides(spec.agent_entity(a), prey)) ++captures;
    }
    for (int a = 0; a < spec.n_agents; ++a) {
      r[a] = -spec.reward_params.chase_shaping * mind +
             spec.reward_params.capture_bonus * captures;
    }
    double pr = spec.reward_params.chase_shaping * mind -
                spec.reward_params.capture_bonus * captures;
    for (double coord : {world.positions[prey].x, world.positions[prey].y}) {
      const double ax = std::abs(coord);
      if (ax < 0.9) {
        pr -= 0.0;
      } else if (ax < 1.0) {
        pr -= (ax - 0.9) * 10.0;
      } else {
        pr -= std::min(std::exp(2.0 * ax - 2.0), 10.0);
      }
    }
    r[spec.n_agents] = pr;
  }
  return r;
}

std::vector<CheckResult> reward_oracles(int worlds_per_scenario,
                                        std::uint64_t seed) {
  std::vector<CheckResult> out;
  const std::vector<std::pair<std::string, int>> scenarios = {
      {"spread", 3},
      {"spread", 6},
      {"tunnel", 3},
      {"simple-tunnel", 3},
      {"obstacle-predator-prey", 3}};
  Rng rng(seed);
  for (const auto& [name, n] : scenarios) {
    ScenarioSpec spec = make_scenario_spec(name, n);
    double worst = 0.0;
    for (int w = 0; w < worlds_per_scenario; ++w) {
      WorldState world;
      world.positions.resize(spec.n_entities());
      world.velocities.resize(spec.n_entities());
      for (int i = 0; i < spec.n_entities(); ++i) {
        world.positions[i] = {rng.uniform(-1.1, 1.1), rng.uniform(-1.1, 1.1)};
        if (spec.specs[i].movable) {
          world.velocities[i] = {rng.uniform(-0.5, 0.5),
                                 rng.uniform(-0.5, 0.5)};
        }
      }
      auto got = reward(world, {}, world, spec);
      auto want = reward_bruteforce(world, spec);
      for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, std::abs(got[i] - want[i]));
      }
    }
    out.push_back(graded("reward-oracle-" + name + "-" + std::to_string(n),
                         worst, 1e-12));
  }
  return out;
}

std::vector<CheckResult> td_arithmetic() {
  std::vector<CheckResult> out;
  out.push_back(graded("td-target-value",
                       std::abs(td_target(1.0, 2.0, 0.95, false) - 2.9),
                       1e-12));
  out.push_back(graded("td-target-terminal",
                       std::abs(td_target(1.0, 2.0, 0.95, true) - 1.0), 1e-15));
  out.push_back(graded("td-target-gamma-zero",
                       std::abs(td_target(0.5, 7.0, 0.0, false) - 0.5),
                       1e-15));
  return out;
}

std::vector<CheckResult> determinism(std::uint64_t seed,
                                     const std::string& scratch_dir) {
  namespace fs = std::filesystem;
  auto run = [&](const std::string& sub) {
    RunConfig cfg = preset_for_scenario("spread-3a");
    cfg.algo = "maddpg";
    cfg.time_steps = 400;
    cfg.batch_size = 64;
    cfg.eval_every = 100;
    cfg.eval_episodes = 2;
    cfg.seed = seed;
    cfg.out_dir = (fs::path(scratch_dir) / sub).string();
    return train(cfg);
  };
  auto a = run("det_run_a");
  auto b = run("det_run_b");
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const bool metrics_equal = slurp(a.metrics_path) == slurp(b.metrics_path);
  const bool ckpt_equal =
      slurp(a.checkpoint_path) == slurp(b.checkpoint_path);
  std::vector<CheckResult> out;
  out.push_back(graded("determinism-metrics-bitwise", metrics_equal ? 0 : 1, 1.0));
  out.push_back(graded("determinism-checkpoint-bitwise", ckpt_equal ? 0 : 1, 1.0));
  return out;
}

std::vector<CheckResult> run_suite(const std::string& suite_id,
                                   std::uint64_t seed,
                                   const std::string& scratch_dir) {
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  if (suite_id == "grad-check") {
    add(grad_fidelity(100, seed));
  } else if (suite_id == "mixers") {
    add(mixer_laws(1000, seed));
  } else if (suite_id == "buffers") {
    add(buffer_semantics(10'000, seed));
  } else if (suite_id == "rewards") {
    add(reward_oracles(1000, seed));
  } else if (suite_id == "td") {
    add(td_arithmetic());
  } else if (suite_id == "determinism") {
    add(determinism(seed, scratch_dir));
  } else if (suite_id == "all") {
    add(grad_fidelity(100, seed));
    add(mixer_laws(1000, seed));
    add(buffer_semantics(10'000, seed));
    add(reward_oracles(1000, seed));
    add(td_arithmetic());
    add(determinism(seed, scratch_dir));
  } else {
    throw ConfigError("unknown verify suite: " + suite_id);
  }
  return out;
}

}  // namespace marl::verify
