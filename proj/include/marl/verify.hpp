#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marl/algos.hpp"
#include "marl/scenario.hpp"

namespace marl::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

// Synthetic team + batch used by the gradient checks.
struct SynthProblem {
  AlgoConfig cfg;
  TeamNets team;
  Batch batch;
};

SynthProblem make_synth(AlgoId algo, MixerKind mixer, int n, int batch_size,
                        int hidden, std::uint64_t seed);

// Independent brute-force recomputation of every scenario reward from raw
// positions (full distance matrix + exhaustive collision enumeration).
std::vector<double> reward_bruteforce(const WorldState& world,
                                      const ScenarioSpec& spec);

// Analytic gradients of every training loss vs central finite differences
// (h=1e-5), plus the raw MLP/LSTM/mixer building blocks.
std::vector<CheckResult> grad_fidelity(int probes_per_loss,
                                       std::uint64_t seed);
std::vector<CheckResult> mixer_laws(int samples, std::uint64_t seed);
std::vector<CheckResult> buffer_semantics(int programs, std::uint64_t seed);
std::vector<CheckResult> reward_oracles(int worlds_per_scenario,
                                        std::uint64_t seed);
std::vector<CheckResult> td_arithmetic();
// Two short training runs with identical config; compares metrics.csv bytes.
std::vector<CheckResult> determinism(std::uint64_t seed,
                                     const std::string& scratch_dir);

// suite ids: grad-check, mixers, buffers, rewards, td, determinism, all
std::vector<CheckResult> run_suite(const std::string& suite_id,
                                   std::uint64_t seed,
                                   const std::string& scratch_dir);

}  // namespace marl::verify
