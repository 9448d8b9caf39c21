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

// Command-line front end: train, eval, ablate, print-config, bestresponse.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dreamcfr/buffers.h"
#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/game_tree.h"
#include "dreamcfr/harness.h"
#include "dreamcfr/trainer.h"
#include "json.hpp"

namespace {

using namespace dreamcfr;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

ArchiveWeighting ParseWeighting(const std::string& s) {
  if (s == "linear") return ArchiveWeighting::kLinear;
  if (s == "uniform") return ArchiveWeighting::kUniform;
  throw InvalidInputError("weighting must be linear or uniform");
}

ModelArchive LoadArchive(const std::string& dir, const std::string& game_flag,
                         GameId* game) {
  GameId stored = GameId::kKuhn;
  ModelArchive archive = ModelArchive::Load(dir, &stored);
  *game = stored;
  if (!game_flag.empty()) {
    *game = ParseGameId(game_flag);
    if (*game != stored) {
      throw InvalidInputError(std::string("archive was trained on ") +
                              GameName(stored));
    }
  }
  return archive;
}

int RunTrainCommand(const std::string& path, bool fresh, bool quiet) {
  const ExperimentConfig config = LoadConfigFile(path);
  RunOptions options;
  options.resume = !fresh;
  options.verbose = !quiet;
  const auto runs = RunTrain(config, options);
  std::printf("%-10s %8s %14s %14s %12s\n", "iteration", "runs", "nodes",
              "mbb/g", "std");
  for (const SeedSummary& s : SummarizeSeeds(runs)) {
    std::printf("%-10d %8d %14.0f %14.2f %12.2f\n", s.iteration, s.runs,
                s.mean_nodes, s.mean_mbb, s.std_mbb);
  }
  return kExitOk;
}

int RunEvalCommand(const std::string& dir, const std::string& game_flag,
                   const std::string& metric, const std::string& weighting,
                   int64_t hands, uint64_t seed, int big_blind) {
  GameId game;
  const ModelArchive archive = LoadArchive(dir, game_flag, &game);
  const ArchiveWeighting w = ParseWeighting(weighting);
  nlohmann::ordered_json out;
  out["game"] = GameName(game);
  out["metric"] = metric;
  out["models"] = {archive.size(0), archive.size(1)};
  if (metric == "exploitability") {
    const GameTree tree = GameTree::Build(game);
    const ExploitabilityResult e =
        Exploitability(tree, ArchiveAveragePolicy(tree, archive, w), big_blind);
    out["br_value_p1"] = e.br_value[0];
    out["br_value_p2"] = e.br_value[1];
    out["exploitability_chips"] = e.total_chips;
    out["exploitability_mbb"] = e.mbb;
    out["per_player_mbb"] = e.per_player_mbb;
  } else if (metric == "probe") {
    const ArchivePolicy policy(archive, w);
    const ProbeEvaluation p =
        EvaluateAgainstProbes(game, policy, hands, seed, big_blind);
    for (const auto& [name, m] : p.matches) {
      out["matches"][name] = {{"mean_chips", m.mean}, {"ci95", m.ci95},
                              {"hands", m.hands}};
    }
    out["lower_bound_mbb"] = p.lower_bound_mbb;
  } else {
    throw InvalidInputError("metric must be exploitability or probe");
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int RunBestResponseCommand(const std::string& dir,
                           const std::string& game_flag,
                           const std::string& weighting,
                           const std::string& policy_out) {
  GameId game;
  const ModelArchive archive = LoadArchive(dir, game_flag, &game);
  const GameTree tree = GameTree::Build(game);
  const TabularPolicy avg =
      ArchiveAveragePolicy(tree, archive, ParseWeighting(weighting));
  nlohmann::ordered_json out;
  out["game"] = GameName(game);
  nlohmann::ordered_json policies;
  for (int exploiter = 0; exploiter < 2; ++exploiter) {
    const BestResponseResult br = BestResponse(tree, avg, exploiter);
    out["br_value_p" + std::to_string(exploiter + 1)] = br.value;
    for (const auto& [key, probs] : br.policy.table()) {
      policies[key.ToString()] = probs;
    }
  }
  if (!policy_out.empty()) {
    std::ofstream f(policy_out);
    f << policies.dump(2) << "\n";
    if (!f) throw Error("cannot write " + policy_out);
    out["policy_file"] = policy_out;
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int RunAblateCommand(const std::string& suite, const std::string& path,
                     bool quiet) {
  const ExperimentConfig base = path.empty()
                                    ? ParseConfig("game = leduc\nprofile = desk\n")
                                    : LoadConfigFile(path);
  RunOptions options;
  options.verbose = !quiet;
  const auto rows = RunAblation(suite, base, options);
  std::cout << FormatAblationTable(rows);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DREAM and neural CFR training harness"};
  app.require_subcommand(1);

  std::string config_path;
  bool fresh = false;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train from a config file");
  train->add_option("config", config_path, "key = value config file")->required();
  train->add_flag("--fresh", fresh, "Ignore existing checkpoints");
  train->add_flag("--quiet", quiet, "No progress output");

  std::string archive_dir;
  std::string game;
  std::string metric = "exploitability";
  std::string weighting = "linear";
  int64_t hands = 20000;
  uint64_t seed = 0;
  int big_blind = 100;
  auto* eval = app.add_subcommand("eval", "Evaluate a model archive");
  eval->add_option("archive", archive_dir, "Archive directory")->required();
  eval->add_option("--game", game, "kuhn, leduc or fhp");
  eval->add_option("--metric", metric, "exploitability or probe");
  eval->add_option("--weighting", weighting, "linear or uniform");
  eval->add_option("--hands", hands, "Hands per probe match");
  eval->add_option("--seed", seed, "Match seed");
  eval->add_option("--big-blind", big_blind, "Chips per big blind");

  std::string suite;
  auto* ablate = app.add_subcommand("ablate", "Run an ablation suite");
  ablate->add_option("suite", suite, "epsilon-sweep, traversal-sweep, q-batch-sweep, reset-mode, baseline-vs-none")
      ->required();
  ablate->add_option("--config", config_path, "Base config file");
  ablate->add_flag("--quiet", quiet, "No progress output");

  auto* print = app.add_subcommand("print-config", "Print the resolved configuration");
  print->add_option("config", config_path, "Config file (defaults when omitted)");

  std::string policy_out;
  auto* br = app.add_subcommand("bestresponse", "Exact best response to an archive");
  br->add_option("archive", archive_dir, "Archive directory")->required();
  br->add_option("--game", game, "kuhn or leduc");
  br->add_option("--weighting", weighting, "linear or uniform");
  br->add_option("--policy-out", policy_out, "Write best-response policies as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*train) return RunTrainCommand(config_path, fresh, quiet);
    if (*eval) {
      return RunEvalCommand(archive_dir, game, metric, weighting, hands, seed,
                            big_blind);
    }
    if (*ablate) return RunAblateCommand(suite, config_path, quiet);
    if (*print) {
      const ExperimentConfig c = config_path.empty()
                                     ? ParseConfig("")
                                     : LoadConfigFile(config_path);
      std::cout << PrintConfig(c);
      return kExitOk;
    }
    if (*br) return RunBestResponseCommand(archive_dir, game, weighting, policy_out);
  } catch (const ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FeasibilityError& e) {
    std::cerr << "not supported: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
