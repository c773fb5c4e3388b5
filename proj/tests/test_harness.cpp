#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "marl/checkpoint.hpp"
#include "marl/config.hpp"
#include "marl/metrics.hpp"
#include "marl/svgplot.hpp"
#include "marl/trainer.hpp"
#include "marl/verify.hpp"

using namespace marl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("marlkit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig tiny_run(const std::string& out, std::uint64_t seed = 5) {
  RunConfig cfg = preset_for_scenario("spread-3a");
  cfg.algo = "maddpg";
  cfg.time_steps = 120;
  cfg.batch_size = 32;
  cfg.eval_every = 60;
  cfg.eval_episodes = 1;
  cfg.seed = seed;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("defaults match the reference hyperparameters") {
  RunConfig cfg = config_from_overrides({});
  CHECK(cfg.gamma == 0.95);
  CHECK(cfg.epsilon == 0.1);
  CHECK(cfg.noise_rate == 0.1);
  CHECK(cfg.lr_actor == 0.001);
  CHECK(cfg.lr_critic == 0.01);
  CHECK(cfg.time_steps == 2'000'000);
  CHECK(cfg.max_episode_len == 100);
}

TEST_CASE("scenario presets") {
  RunConfig s6 = config_from_overrides({{"scenario", "spread-6a"}});
  CHECK(s6.batch_size == 32);
  CHECK(s6.seq_length == 3);
  RunConfig s3 = config_from_overrides({{"scenario", "spread-3a"}});
  CHECK(s3.batch_size == 128);
  CHECK(s3.seq_length == 5);
  RunConfig st6 = config_from_overrides({{"scenario", "simple-tunnel-6a"}});
  CHECK(st6.lr_critic == 0.001);
  CHECK(st6.batch_size == 32);
  RunConfig pp = config_from_overrides({{"scenario", "obstacle-predator-prey"}});
  CHECK(pp.num_adversaries == 1);
  CHECK(pp.batch_size == 256);
  CHECK(pp.seq_length == 3);
}

TEST_CASE("config precedence: flags > file > preset > defaults") {
  auto dir = scratch_dir("config");
  const auto file = dir / "run.cfg";
  {
    std::ofstream f(file);
    f << "# comment line\n";
    f << "scenario = spread-6a\n";
    f << "Batch-size = 64\n";
  }
  RunConfig from_file = load_config(file.string(), {});
  CHECK(from_file.scenario == "spread-6a");
  CHECK(from_file.batch_size == 64);  // file overrides the preset's 32
  CHECK(from_file.seq_length == 3);   // preset still applies elsewhere
  RunConfig flagged = load_config(file.string(), {{"Batch-size", "128"}});
  CHECK(flagged.batch_size == 128);  // flag overrides the file
}

TEST_CASE("unknown keys and invalid combinations are rejected by name") {
  auto dir = scratch_dir("badcfg");
  const auto file = dir / "bad.cfg";
  {
    std::ofstream f(file);
    f << "Batchsize = 64\n";
  }
  try {
    load_config(file.string(), {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("Batchsize") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_overrides(
                      {{"scenario", "simple-tunnel"}, {"algo", "facmac"}}),
                  ConfigError);
}

TEST_CASE("resolved config echo round-trips") {
  RunConfig cfg = config_from_overrides(
      {{"scenario", "spread-6a"}, {"algo", "maddpg-lstm"}, {"seed", "42"}});
  auto dir = scratch_dir("echo");
  const auto file = dir / "config.resolved";
  {
    std::ofstream f(file);
    f << serialize_config(cfg);
  }
  RunConfig again = load_config(file.string(), {});
  CHECK(serialize_config(again) == serialize_config(cfg));
}

TEST_CASE("checkpoint round-trip and corruption detection") {
  auto dir = scratch_dir("ckpt");
  auto p = verify::make_synth(AlgoId::Maddpg, MixerKind::Vdn, 3, 4, 16, 77);
  Checkpoint ckpt =
      checkpoint_from_team(p.team, {{"scenario", "spread-3a"}, {"algo", "maddpg"}});
  const auto path = (dir / "checkpoint.bin").string();
  save_checkpoint(ckpt, path);

  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.metadata.at("scenario") == "spread-3a");
  auto q = verify::make_synth(AlgoId::Maddpg, MixerKind::Vdn, 3, 4, 16, 999);
  team_from_checkpoint(loaded, q.team);
  for (int a = 0; a < 3; ++a) {
    CHECK(to_flat(q.team.agents[a].actor) == to_flat(p.team.agents[a].actor));
    CHECK(to_flat(q.team.agents[a].critic_target) ==
          to_flat(p.team.agents[a].critic_target));
  }

  // flipping any single payload byte must fail the load
  std::string bytes = slurp(path);
  std::string corrupt = bytes;
  corrupt[bytes.size() / 2] ^= 0x01;
  const auto bad_path = (dir / "corrupt.bin").string();
  {
    std::ofstream out(bad_path, std::ios::binary);
    out << corrupt;
  }
  CHECK_THROWS_AS(load_checkpoint(bad_path), CheckpointError);

  // truncation must fail too
  const auto short_path = (dir / "short.bin").string();
  {
    std::ofstream out(short_path, std::ios::binary);
    out << bytes.substr(0, bytes.size() - 7);
  }
  CHECK_THROWS_AS(load_checkpoint(short_path), CheckpointError);

  // a checkpoint for a different layout is rejected
  auto other = verify::make_synth(AlgoId::Iddpg, MixerKind::Vdn, 2, 4, 8, 1);
  CHECK_THROWS_AS(team_from_checkpoint(loaded, other.team), CheckpointError);
}

TEST_CASE("metrics files parse back and reject malformed rows") {
  auto dir = scratch_dir("metrics");
  const auto path = (dir / "metrics.csv").string();
  MetricsRow row;
  row.timestep = 5000;
  row.episode = 50;
  row.agent_returns = {-1.25, -1.5, -0.75};
  row.mean_return = (-1.25 - 1.5 - 0.75) / 3.0;
  {
    std::ofstream f(path);
    f << metrics_header(3, 0) << "\n" << format_metrics_row(row, 3) << "\n";
  }
  MetricsFile file = read_metrics(path);
  CHECK(file.n_trained == 3);
  REQUIRE(file.rows.size() == 1);
  CHECK(file.rows[0].timestep == 5000);
  CHECK(file.rows[0].agent_returns[1] == -1.5);
  CHECK(file.rows[0].mean_return == doctest::Approx(row.mean_return));

  {
    std::ofstream f(path);
    f << metrics_header(3, 0) << "\n" << format_metrics_row(row, 3) << "\n";
    f << "5001,51,bad\n";
  }
  try {
    read_metrics(path);
    FAIL("expected MetricsError");
  } catch (const MetricsError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);  // line number
  }

  {
    std::ofstream f(path);
    f << metrics_header(3, 0) << "\n";
    f << format_metrics_row(row, 3) << "\n";
    f << format_metrics_row(row, 3) << "\n";  // duplicate timestep
  }
  CHECK_THROWS_AS(read_metrics(path), MetricsError);
}

TEST_CASE("svg rendering is deterministic and structured") {
  Curve a{"maddpg", {0, 5000, 10000}, {-3.0, -2.0, -1.5}};
  Curve b{"iddpg", {0, 5000, 10000}, {-3.5, -2.5, -2.0}};
  const std::string doc1 = render_svg({a, b});
  const std::string doc2 = render_svg({a, b});
  CHECK(doc1 == doc2);
  CHECK(doc1.find("<svg") != std::string::npos);
  CHECK(doc1.find("polyline") != std::string::npos);
  CHECK(doc1.find("maddpg") != std::string::npos);
  CHECK(doc1.find("iddpg") != std::string::npos);
  Curve single{"one", {5000}, {-2.0}};
  const std::string dot = render_svg({single});
  CHECK(dot.find("circle") != std::string::npos);
}

TEST_CASE("train writes the full artifact set") {
  auto dir = scratch_dir("run");
  RunConfig cfg = tiny_run((dir / "a").string());
  RunArtifacts art = train(cfg);
  CHECK(fs::exists(art.metrics_path));
  CHECK(fs::exists(art.checkpoint_path));
  CHECK(fs::exists(art.config_path));
  CHECK(fs::exists(art.svg_path));
  MetricsFile m = read_metrics(art.metrics_path);
  REQUIRE(m.rows.size() == 2);  // 120 steps, eval every 60
  CHECK(m.rows[0].timestep == 60);
  CHECK(m.rows[1].timestep == 120);
  RunConfig echoed = load_config(art.config_path, {});
  CHECK(serialize_config(echoed) == serialize_config(cfg));
}

TEST_CASE("update counter: warmup equals the batch size") {
  auto dir = scratch_dir("counter");
  RunConfig cfg = tiny_run((dir / "b").string());
  cfg.time_steps = 500;
  cfg.batch_size = 256;
  cfg.eval_every = 1000;  // no eval points in range
  RunArtifacts art = train(cfg);
  CHECK(art.updates == 500 - 255);
  MetricsFile m = read_metrics(art.metrics_path);
  CHECK(m.rows.empty());
}

TEST_CASE("time-steps 0 still writes an initial checkpoint") {
  auto dir = scratch_dir("zero");
  RunConfig cfg = tiny_run((dir / "c").string());
  cfg.time_steps = 0;
  RunArtifacts art = train(cfg);
  CHECK(art.updates == 0);
  CHECK(read_metrics(art.metrics_path).rows.empty());
  CHECK(fs::exists(art.checkpoint_path));
  Checkpoint ckpt = load_checkpoint(art.checkpoint_path);
  CHECK(ckpt.metadata.at("algo") == "maddpg");
}

TEST_CASE("zero-weight actors behave like the stationary policy") {
  ScenarioSpec spec = make_scenario_spec("spread", 3);
  RunConfig cfg = preset_for_scenario("spread-3a");
  std::vector<int> obs_dims;
  for (int i = 0; i < spec.n_policies(); ++i) obs_dims.push_back(obs_dim(spec, i));
  int state_dim = 0;
  for (int d : obs_dims) state_dim += d;
  Rng init(9);
  TeamNets team = make_team(cfg.algo_config(), obs_dims, spec.n_agents,
                            state_dim, 2, init);
  for (auto& agent : team.agents) {
    std::vector<double> zeros(to_flat(agent.actor).size(), 0.0);
    from_flat(std::span<const double>(zeros), agent.actor);
  }
  auto evals = evaluate_team(team, spec, cfg.algo_config(), 4,
                             Rng::substream(1, "eval", 0));
  const double stationary =
      stationary_policy_return(spec, 4, Rng::substream(1, "eval", 0));
  CHECK(trained_mean(evals, spec.n_agents) ==
        doctest::Approx(stationary).epsilon(1e-12));
}

TEST_CASE("checkpoint evaluation is reproducible") {
  auto dir = scratch_dir("evalckpt");
  RunConfig cfg = tiny_run((dir / "d").string());
  RunArtifacts art = train(cfg);
  auto r1 = evaluate_checkpoint(art.checkpoint_path, "", 2, 11);
  auto r2 = evaluate_checkpoint(art.checkpoint_path, "", 2, 11);
  CHECK(r1 == r2);
}
