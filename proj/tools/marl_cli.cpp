// Command-line front end: train / eval / plot / verify / sweep.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marl/config.hpp"
#include "marl/metrics.hpp"
#include "marl/svgplot.hpp"
#include "marl/trainer.hpp"
#include "marl/verify.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> kv;  // flag overrides, config key names
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  auto opt = [&](const std::string& flag, const std::string& key,
                 const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&f, key](const std::string& v) { f.kv[key] = v; }, help);
  };
  opt("--scenario", "scenario", "Scenario id");
  opt("--algo", "algo", "Algorithm id");
  opt("--mixer", "mixer", "FACMAC mixer: vdn|monotonic|nonmonotonic");
  opt("--sharing", "sharing", "FACMAC parameter sharing mode");
  opt("--staged-watershed", "staged-watershed",
      "FACMAC staged-training watershed step");
  opt("--time-steps", "time-steps", "Total environment steps");
  opt("--seed", "seed", "Run seed");
  opt("--out", "out", "Output directory");
  opt("--eval-every", "eval-every", "Evaluation period in steps");
  opt("--eval-episodes", "eval-episodes", "Episodes per evaluation point");
  cmd->add_option("--config", f.config_path, "key=value config file");
}

void write_text(const std::string& path, const std::string& body) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
}

int cmd_train(const CommonFlags& flags) {
  marl::RunConfig cfg = marl::load_config(flags.config_path, flags.kv);
  auto art = marl::train(cfg);
  std::printf("trained %s/%s for %lld steps (%lld updates, %lld episodes)\n",
              cfg.scenario.c_str(), cfg.algo.c_str(),
              static_cast<long long>(cfg.time_steps),
              static_cast<long long>(art.updates),
              static_cast<long long>(art.episodes));
  std::printf("wrote %s\n", art.out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& scenario,
             long long episodes, long long seed) {
  auto per_policy = marl::evaluate_checkpoint(
      ckpt, scenario, static_cast<int>(episodes),
      static_cast<std::uint64_t>(seed));
  for (std::size_t i = 0; i < per_policy.size(); ++i) {
    std::printf("policy_%zu_return=%.6f\n", i, per_policy[i]);
  }
  return 0;
}

int cmd_plot(const std::vector<std::string>& metrics_files,
             const std::string& out_svg) {
  std::vector<marl::Curve> curves;
  for (const auto& path : metrics_files) {
    auto file = marl::read_metrics(path);
    marl::Curve c;
    c.label = std::filesystem::path(path).parent_path().filename().string();
    if (c.label.empty()) c.label = path;
    for (const auto& row : file.rows) {
      c.x.push_back(static_cast<double>(row.timestep));
      c.y.push_back(row.mean_return);
    }
    curves.push_back(std::move(c));
  }
  write_text(out_svg, marl::render_svg(curves));
  std::printf("wrote %s\n", out_svg.c_str());
  return 0;
}

int cmd_verify(const std::string& suite, long long seed,
               const std::string& scratch) {
  auto results = marl::verify::run_suite(
      suite, static_cast<std::uint64_t>(seed), scratch);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-40s measured=%.6g threshold=%.6g%s%s\n",
                r.pass ? "pass" : "FAIL", r.name.c_str(), r.measured,
                r.threshold, r.note.empty() ? "" : " ", r.note.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<std::string>& algos,
              const std::vector<long long>& seeds) {
  std::vector<marl::Curve> curves;
  std::string root = "out/sweep";
  if (auto it = flags.kv.find("out"); it != flags.kv.end()) root = it->second;
  for (const auto& algo : algos) {
    for (long long seed : seeds) {
      CommonFlags f = flags;
      f.kv["algo"] = algo;
      f.kv["seed"] = std::to_string(seed);
      f.kv["out"] = root + "/" + algo + "_seed" + std::to_string(seed);
      marl::RunConfig cfg = marl::load_config(f.config_path, f.kv);
      auto art = marl::train(cfg);
      auto file = marl::read_metrics(art.metrics_path);
      marl::Curve c;
      c.label = algo + " seed " + std::to_string(seed);
      for (const auto& row : file.rows) {
        c.x.push_back(static_cast<double>(row.timestep));
        c.y.push_back(row.mean_return);
      }
      curves.push_back(std::move(c));
      std::printf("finished %s seed %lld -> %s\n", algo.c_str(), seed,
                  art.out_dir.c_str());
    }
  }
  const std::string svg = root + "/sweep.svg";
  write_text(svg, marl::render_svg(curves));
  std::printf("wrote %s\n", svg.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent obstacle-avoidance RL workbench"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  auto* train_cmd =
      app.add_subcommand("train", "Train a run and write artifacts");
  add_common(train_cmd, train_flags);

  std::string eval_ckpt, eval_scenario;
  long long eval_episodes = 10, eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint.bin path")
      ->required();
  eval_cmd->add_option("--scenario", eval_scenario,
                       "Scenario id (defaults to the one in the checkpoint)");
  eval_cmd->add_option("--episodes", eval_episodes, "Episodes to average");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");

  std::vector<std::string> plot_inputs;
  std::string plot_out = "curves.svg";
  auto* plot_cmd =
      app.add_subcommand("plot", "Render metrics.csv files to SVG");
  plot_cmd->add_option("--metrics", plot_inputs, "metrics.csv paths")
      ->required();
  plot_cmd->add_option("--out", plot_out, "Output SVG path");

  std::string verify_suite = "all";
  long long verify_seed = 12345;
  std::string verify_scratch = "out/verify";
  auto* verify_cmd = app.add_subcommand("verify", "Run self-check suites");
  verify_cmd->add_option(
      "--suite", verify_suite,
      "grad-check|mixers|buffers|rewards|td|determinism|all");
  verify_cmd->add_option("--seed", verify_seed, "Suite seed");
  verify_cmd->add_option("--scratch", verify_scratch, "Scratch directory");

  CommonFlags sweep_flags;
  std::vector<std::string> sweep_algos;
  std::vector<long long> sweep_seeds = {0};
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Train several algo/seed combos and plot");
  add_common(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--algos", sweep_algos, "Algorithms to sweep")
      ->required();
  sweep_cmd->add_option("--seeds", sweep_seeds, "Seeds to sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(train_flags);
    if (eval_cmd->parsed())
      return cmd_eval(eval_ckpt, eval_scenario, eval_episodes, eval_seed);
    if (plot_cmd->parsed()) return cmd_plot(plot_inputs, plot_out);
    if (verify_cmd->parsed())
      return cmd_verify(verify_suite, verify_seed, verify_scratch);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_flags, sweep_algos, sweep_seeds);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
