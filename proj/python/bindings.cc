// Copyright 2026 The dreamcfr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/game.h"
#include "dreamcfr/game_tree.h"
#include "dreamcfr/harness.h"
#include "dreamcfr/policy.h"
#include "dreamcfr/random.h"
#include "dreamcfr/tabular_cfr.h"
#include "dreamcfr/trainer.h"
#include "dreamcfr/variance_probe.h"

namespace py = pybind11;
using namespace dreamcfr;

namespace {

std::map<std::string, std::vector<double>> PolicyDict(const TabularPolicy& p) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [key, probs] : p.table()) out[key.ToString()] = probs;
  return out;
}

py::dict ExploitabilityDict(const ExploitabilityResult& e) {
  py::dict d;
  d["br_value_p1"] = e.br_value[0];
  d["br_value_p2"] = e.br_value[1];
  d["chips"] = e.total_chips;
  d["mbb"] = e.mbb;
  return d;
}

py::dict ReportDict(const IterationReport& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["traverser"] = r.traverser;
  d["nodes_touched"] = r.nodes_touched;
  d["total_nodes_touched"] = r.total_nodes_touched;
  d["q_loss"] = r.q_loss;
  d["d_loss"] = r.d_loss;
  d["d_reset"] = r.d_reset;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DREAM and tabular CFR core";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigParseError>(m, "ConfigParseError",
                                           PyExc_ValueError);
  py::register_exception<ConfigValidationError>(m, "ConfigValidationError",
                                                PyExc_ValueError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError",
                                            PyExc_ValueError);
  py::register_exception<IllegalActionError>(m, "IllegalActionError",
                                             PyExc_ValueError);
  py::register_exception<FeasibilityError>(m, "FeasibilityError",
                                           PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError",
                                          PyExc_RuntimeError);

  py::enum_<GameId>(m, "Game")
      .value("KUHN", GameId::kKuhn)
      .value("LEDUC", GameId::kLeduc)
      .value("FHP", GameId::kFhp);
  py::enum_<ActionType>(m, "Action")
      .value("FOLD", ActionType::kFold)
      .value("CALL", ActionType::kCall)
      .value("RAISE", ActionType::kRaise);
  py::enum_<Weighting>(m, "Weighting")
      .value("VANILLA", Weighting::kVanilla)
      .value("LINEAR", Weighting::kLinear);
  py::enum_<UpdateMode>(m, "UpdateMode")
      .value("SIMULTANEOUS", UpdateMode::kSimultaneous)
      .value("ALTERNATING", UpdateMode::kAlternating);

  m.def("parse_game", [](const std::string& s) { return ParseGameId(s); });

  py::class_<GameState>(m, "GameState")
      .def_static("initial", &GameState::Initial)
      .def_static(
          "fixed_deal",
          [](GameId g, std::vector<int> h0, std::vector<int> h1,
             std::vector<int> board) {
            return GameState::FixedDeal(g, h0, h1, board);
          },
          py::arg("game"), py::arg("hole_p0"), py::arg("hole_p1"),
          py::arg("board") = std::vector<int>{})
      .def_property_readonly("actor", &GameState::actor)
      .def_property_readonly("is_terminal", &GameState::IsTerminal)
      .def("legal_actions", &LegalActions)
      .def("apply", [](const GameState& s, ActionType a) { return Apply(s, a); })
      .def("chance_outcomes",
           [](const GameState& s) {
             std::vector<std::pair<GameState, double>> out;
             for (const ChanceOutcome& o : ChanceOutcomes(s)) {
               out.emplace_back(Apply(s, o), o.probability);
             }
             return out;
           })
      .def("terminal_reward", &TerminalReward)
      .def("contribution", &GameState::contribution)
      .def("__repr__", &GameState::ToString);

  py::class_<CfrSolver>(m, "CfrSolver")
      .def(py::init([](GameId g, Weighting w, UpdateMode u) {
             return CfrSolver(GameTree::Build(g), w, u);
           }),
           py::arg("game"), py::arg("weighting") = Weighting::kVanilla,
           py::arg("updates") = UpdateMode::kAlternating)
      .def("run_iterations", &CfrSolver::RunIterations)
      .def_property_readonly("iteration", &CfrSolver::iteration)
      .def("average_policy",
           [](const CfrSolver& s) { return PolicyDict(s.AveragePolicy()); })
      .def("current_policy",
           [](const CfrSolver& s) { return PolicyDict(s.CurrentPolicy()); })
      .def(
          "exploitability",
          [](const CfrSolver& s, int big_blind) {
            return ExploitabilityDict(
                Exploitability(s.tree(), s.AveragePolicy(), big_blind));
          },
          py::arg("big_blind") = 100);

  m.def(
      "uniform_exploitability",
      [](GameId g, int big_blind) {
        return ExploitabilityDict(Exploitability(g, UniformPolicy(), big_blind));
      },
      py::arg("game"), py::arg("big_blind") = 100);

  m.def(
      "print_config",
      [](const std::string& text) { return PrintConfig(ParseConfig(text)); },
      py::arg("text") = "");

  py::class_<Trainer>(m, "Trainer")
      .def(py::init([](const std::string& text) {
             return Trainer(ParseConfig(text).trainer);
           }),
           py::arg("config") = "")
      .def("run_iteration",
           [](Trainer& t) { return ReportDict(t.RunIteration()); })
      .def_property_readonly("iteration", &Trainer::last_iteration)
      .def_property_readonly("total_nodes_touched",
                             &Trainer::total_nodes_touched)
      .def("archive_size",
           [](const Trainer& t, int agent) { return t.archive().size(agent); })
      .def(
          "exploitability",
          [](const Trainer& t, int big_blind) {
            const GameTree tree = GameTree::Build(t.config().game);
            return ExploitabilityDict(Exploitability(
                tree,
                ArchiveAveragePolicy(tree, t.archive(), t.archive_weighting()),
                big_blind));
          },
          py::arg("big_blind") = 100)
      .def("save_checkpoint", &Trainer::SaveCheckpoint)
      .def_static("load_checkpoint", &Trainer::LoadCheckpoint)
      .def("__eq__", [](const Trainer& a, const Trainer& b) { return a == b; });

  m.def(
      "variance_probe",
      [](GameId g, const std::string& estimator, double epsilon, int samples,
         uint64_t seed) {
        ProbeOptions options;
        options.estimator = ParseEstimator(estimator);
        options.epsilon = epsilon;
        options.samples = samples;
        Rng rng(seed);
        const VarianceProbeResult r =
            VarianceProbe(GameState::Initial(g), UniformPolicy(), options, rng);
        py::dict d;
        d["aggregate"] = r.aggregate;
        d["cells"] = r.cells.size();
        d["nodes_touched"] = r.nodes_touched;
        return d;
      },
      py::arg("game"), py::arg("estimator") = "os", py::arg("epsilon") = 0.5,
      py::arg("samples") = 1000, py::arg("seed") = 0);
}
