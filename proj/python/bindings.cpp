// Python bindings. Reports and configs cross the boundary as JSON text; the
// package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "periodize/agent.hpp"
#include "periodize/config.hpp"
#include "periodize/evaluate.hpp"
#include "periodize/report.hpp"
#include "periodize/trainer.hpp"

namespace py = pybind11;
using namespace periodize;

namespace {

std::vector<double> weights(const Distribution& d) { return {d.weights().begin(), d.weights().end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trainer/agent model of stochastic training programs";
  m.attr("__version__") = std::string(version());

  py::register_exception<MultipleRecurrentClasses>(m, "MultipleRecurrentClasses", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<ValueError>(m, "ConfigValueError", PyExc_ValueError);
  py::register_exception<NonIntegerRatio>(m, "NonIntegerRatio", PyExc_ValueError);
  py::register_exception<InfeasibleMargin>(m, "InfeasibleMargin", PyExc_ValueError);
  py::register_exception<InvalidCap>(m, "InvalidCap", PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int mu, double c, double delta, double epsilon) {
             ModelParams p{mu, c, delta, epsilon};
             p.validate();
             return p;
           }),
           py::arg("mu") = 1, py::arg("c") = 0.5, py::arg("delta") = 0.999, py::arg("epsilon") = 0.01)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(mu=" + std::to_string(p.mu) + ", c=" + std::to_string(p.c) +
               ", delta=" + std::to_string(p.delta) + ", epsilon=" + std::to_string(p.epsilon) + ")";
      });

  py::class_<TrainerPolicy>(m, "TrainerPolicy")
      .def(py::init([](std::vector<std::vector<double>> rows, std::vector<Intensity> intensity,
                       std::vector<std::string> labels) {
             if (labels.empty())
               for (std::size_t i = 0; i < intensity.size(); ++i) labels.push_back("s" + std::to_string(i));
             return TrainerPolicy(std::move(labels), TransitionMatrix::from_rows(rows), std::move(intensity));
           }),
           py::arg("transitions"), py::arg("intensity"), py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("labels", &TrainerPolicy::labels)
      .def_property_readonly("transitions", [](const TrainerPolicy& p) { return p.transitions().to_rows(); })
      .def_property_readonly("intensity", py::overload_cast<>(&TrainerPolicy::intensity, py::const_))
      .def_property_readonly("stationary", [](const TrainerPolicy& p) { return weights(p.stationary()); })
      .def("average_intensity", &TrainerPolicy::average_intensity)
      .def("__len__", &TrainerPolicy::size);

  py::class_<AgentPolicy>(m, "AgentPolicy")
      .def_property_readonly("max_mass", &AgentPolicy::max_mass)
      .def("move", &AgentPolicy::move, py::arg("state"), py::arg("previous_mass"))
      .def("next_mass", &AgentPolicy::next_mass, py::arg("state"), py::arg("previous_mass"))
      .def("__eq__", [](const AgentPolicy& a, const AgentPolicy& b) { return a == b; });

  py::class_<MassStats>(m, "MassStats")
      .def_readonly("min_mass", &MassStats::min_mass)
      .def_readonly("max_mass", &MassStats::max_mass)
      .def_readonly("mass_marginal", &MassStats::mass_marginal)
      .def_readonly("average_mass", &MassStats::average_mass)
      .def_readonly("average_intensity", &MassStats::average_intensity)
      .def_readonly("positive_intensity", &MassStats::positive_intensity);

  py::class_<PeriodicPlan>(m, "PeriodicPlan")
      .def_readonly("orbit", &PeriodicPlan::orbit)
      .def_readonly("orbit_count", &PeriodicPlan::orbit_count)
      .def_readonly("average_cost", &PeriodicPlan::average_cost)
      .def("cycle_cost", &PeriodicPlan::cycle_cost)
      .def("min_mass", &PeriodicPlan::min_mass);

  m.def("stationary_distribution",
        [](const std::vector<std::vector<double>>& rows) {
          return weights(stationary_distribution(TransitionMatrix::from_rows(rows)));
        },
        py::arg("transitions"));
  m.def("constant_policy", &constant_policy, py::arg("mu"));
  m.def("prop1_policy", &prop1_policy, py::arg("mu"), py::arg("epsilon"));
  m.def("prop2_policy", &prop2_policy, py::arg("params"), py::arg("margin") = 0.001);
  m.def("cycle_policy", &cycle_policy, py::arg("sequence"));
  m.def("two_state_policy",
        [](Intensity low, Intensity high, double alpha, double beta) {
          return TwoStateSpec{low, high, alpha, beta}.to_policy();
        },
        py::arg("d_low"), py::arg("d_high"), py::arg("alpha"), py::arg("beta"));

  m.def("myopic_policy", [](const TrainerPolicy& t) { return myopic_policy(t); }, py::arg("trainer"));
  m.def("solve_agent", [](const TrainerPolicy& t, const ModelParams& p) { return solve_agent_mdp(t, p); },
        py::arg("trainer"), py::arg("params"));
  m.def("cyclic_best_reply",
        [](const std::vector<Intensity>& cycle, const ModelParams& p) { return cyclic_best_reply(cycle, p); },
        py::arg("cycle"), py::arg("params"));

  m.def("mass_stats",
        [](const TrainerPolicy& t, const AgentPolicy& a) { return mass_stats(build_extended_chain(t, a)); },
        py::arg("trainer"), py::arg("agent"));
  m.def("flow_identity_residual",
        [](const TrainerPolicy& t, const AgentPolicy& a) { return flow_identity_residual(build_extended_chain(t, a)); },
        py::arg("trainer"), py::arg("agent"));
  m.def("simulate_masses",
        [](const TrainerPolicy& t, const AgentPolicy& a, Mass m0, std::size_t periods, std::uint64_t seed) {
          const SimulationPath path = simulate(t, a, m0, periods, seed);
          std::vector<Mass> masses;
          masses.reserve(path.length());
          for (const auto& r : path.records) masses.push_back(r.mass);
          return masses;
        },
        py::arg("trainer"), py::arg("agent"), py::arg("m0"), py::arg("periods"), py::arg("seed"));

  m.def("scenario_names", &scenario_names);
  m.def("_run_scenario_json",
        [](const std::string& name, const std::vector<std::string>& overrides) {
          py::gil_scoped_release release;
          return to_json(run_scenario(name, overrides), false).dump();
        },
        py::arg("name"), py::arg("overrides") = std::vector<std::string>{});
  m.def("_run_config_json",
        [](const std::string& text, const std::string& mode) {
          const ExperimentConfig config = parse_config(std::string_view(text));
          RunMode run_mode = RunMode::Analyze;
          if (mode == "simulate") run_mode = RunMode::Simulate;
          else if (mode == "search") run_mode = RunMode::Search;
          else if (mode != "analyze") throw std::invalid_argument("unknown mode " + mode);
          py::gil_scoped_release release;
          return to_json(run(config, run_mode), false).dump();
        },
        py::arg("config"), py::arg("mode") = "analyze");
}
