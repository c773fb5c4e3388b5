// Python bindings for the core operations: scenario construction, stepping,
// observations/rewards, mixers, TD targets, evaluation oracles, and the
// verification suites.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "marl/algos.hpp"
#include "marl/config.hpp"
#include "marl/mixer.hpp"
#include "marl/scenario.hpp"
#include "marl/trainer.hpp"
#include "marl/verify.hpp"

namespace py = pybind11;
using namespace marl;

namespace {

// A small stateful environment wrapper so Python can drive rollouts without
// shuttling the full WorldState back and forth.
class Env {
 public:
  Env(const std::string& scenario, int n_agents, std::uint64_t seed)
      : spec_(make_scenario_spec(scenario, n_agents)), rng_(seed) {
    reset();
  }

  void reset() {
    world_ = reset_world(spec_, rng_, episode_++);
  }

  py::tuple step(const std::vector<std::pair<double, double>>& actions) {
    if (static_cast<int>(actions.size()) != spec_.n_policies()) {
      throw InputError("expected " + std::to_string(spec_.n_policies()) +
                       " actions");
    }
    std::vector<Vec2> forces;
    forces.reserve(actions.size());
    for (const auto& [x, y] : actions) forces.push_back({x, y});
    WorldState next = step_world(world_, forces, spec_.world_cfg, spec_.specs);
    auto r = reward(world_, forces, next, spec_);
    world_ = std::move(next);
    const bool done = is_terminal(world_, spec_);
    return py::make_tuple(observations(), r, done);
  }

  std::vector<std::vector<double>> observations() const {
    std::vector<std::vector<double>> obs;
    for (int p = 0; p < spec_.n_policies(); ++p) {
      obs.push_back(observe(world_, p, spec_));
    }
    return obs;
  }

  std::vector<double> state() const { return global_state(world_, spec_); }
  int n_policies() const { return spec_.n_policies(); }
  int n_agents() const { return spec_.n_agents; }
  std::vector<std::pair<double, double>> positions() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : world_.positions) out.emplace_back(p.x, p.y);
    return out;
  }

 private:
  ScenarioSpec spec_;
  Rng rng_;
  WorldState world_;
  std::int64_t episode_ = 0;
};

}  // namespace

PYBIND11_MODULE(_marlkit, m) {
  m.doc() = "Multi-agent obstacle-avoidance RL workbench (core bindings)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InputError>(m, "InputError");

  py::class_<Env>(m, "Env")
      .def(py::init<const std::string&, int, std::uint64_t>(),
           py::arg("scenario"), py::arg("n_agents"), py::arg("seed"))
      .def("reset", &Env::reset)
      .def("step", &Env::step, py::arg("actions"))
      .def("observations", &Env::observations)
      .def("state", &Env::state)
      .def("positions", &Env::positions)
      .def_property_readonly("n_policies", &Env::n_policies)
      .def_property_readonly("n_agents", &Env::n_agents);

  m.def("td_target", &td_target, py::arg("reward"), py::arg("next_value"),
        py::arg("gamma"), py::arg("terminal"));
  m.def(
      "mixer_vdn",
      [](const std::vector<double>& q) { return mixer_vdn(q); },
      py::arg("local_qs"));
  m.def(
      "mixer_forward",
      [](const std::string& kind, int n, int state_dim, int embed,
         std::uint64_t seed, const std::vector<double>& state,
         const std::vector<double>& q) {
        Rng rng(seed);
        MixerNet net =
            make_mixer(mixer_kind_from_string(kind), n, state_dim, embed, rng);
        return mixer_forward(net, state, q);
      },
      py::arg("kind"), py::arg("n"), py::arg("state_dim"), py::arg("embed"),
      py::arg("seed"), py::arg("state"), py::arg("local_qs"),
      "Forward pass of a freshly initialized mixer (for property tests).");
  m.def(
      "critic_input_dim",
      [](const std::string& algo, int n, int state_dim, int d_obs,
         int act_dim) {
        return critic_input_dim(algo_from_string(algo), n, state_dim, d_obs,
                                act_dim);
      },
      py::arg("algo"), py::arg("n"), py::arg("state_dim"), py::arg("d_obs"),
      py::arg("act_dim"));
  m.def(
      "train",
      [](const std::map<std::string, std::string>& overrides) {
        RunConfig cfg = config_from_overrides(overrides);
        RunArtifacts art = train(cfg);
        return py::dict(py::arg("out_dir") = art.out_dir,
                        py::arg("metrics") = art.metrics_path,
                        py::arg("checkpoint") = art.checkpoint_path,
                        py::arg("updates") = art.updates,
                        py::arg("episodes") = art.episodes);
      },
      py::arg("config"),
      "Run a training job from a config-key dictionary; returns artifact "
      "paths.");
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed,
         const std::string& scratch) {
        auto results = verify::run_suite(suite, seed, scratch);
        py::list out;
        for (const auto& r : results) {
          out.append(py::dict(py::arg("name") = r.name,
                              py::arg("pass") = r.pass,
                              py::arg("measured") = r.measured,
                              py::arg("threshold") = r.threshold));
        }
        return out;
      },
      py::arg("suite"), py::arg("seed") = 12345,
      py::arg("scratch") = "out/verify");
}
