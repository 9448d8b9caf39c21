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

#ifndef DREAMCFR_HARNESS_H_
#define DREAMCFR_HARNESS_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dreamcfr/trainer.h"

namespace dreamcfr {

inline constexpr char kVersion[] = "0.1.0";

enum class LogFormat { kCsv, kJsonl };
enum class Profile { kPaper, kDesk };

struct ExperimentConfig {
  TrainerConfig trainer;
  int eval_every = 10;
  std::string output_dir = "runs";
  std::string run_id = "run";
  LogFormat log_format = LogFormat::kCsv;
  bool deterministic = true;
  Profile profile = Profile::kPaper;
  int seeds = 1;
  int big_blind = 100;
  int checkpoint_every = 0;  // 0: only when the run ends
  int64_t probe_hands = 20000;
  // Stop once this many nodes were touched (0: run all iterations).
  int64_t node_budget = 0;
  std::vector<double> epsilon_grid{0.25, 0.5, 0.75, 1.0};
  std::vector<int> traversal_grid{300, 900, 2700};
  std::vector<int> q_batch_grid{10, 100, 1000};

  // Where each value came from: "published", "artifact default",
  // "desk profile" or "config".
  std::map<std::string, std::string> origin;
};

// key = value lines; '#' starts a comment. Throws ConfigParseError (with the
// line number) on malformed lines and duplicate keys, ConfigValidationError
// naming the key on unknown keys and invalid values.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfigFile(const std::string& path);

// One "key = value  # origin" line per key, in a fixed order.
std::string PrintConfig(const ExperimentConfig& config);

struct EvalRow {
  std::string run_id;
  int iteration = 0;
  int64_t nodes_touched = 0;
  double exploitability_mbb = 0.0;
  double br_value_p1 = 0.0;
  double br_value_p2 = 0.0;
  double wall_time_s = 0.0;
};

inline constexpr char kEvalCsvHeader[] =
    "run_id,iteration,nodes_touched,exploitability_mbb,br_value_p1,"
    "br_value_p2,wall_time_s";
std::string FormatEvalCsv(const std::vector<EvalRow>& rows);

struct RunManifest {
  std::string run_id;
  uint64_t seed = 0;
  std::string directory;
  std::string status = "running";  // running, complete, diverged
  std::vector<IterationReport> iterations;
  std::vector<EvalRow> evaluations;
};

// Output root: $DREAMCFR_OUTPUT_ROOT if set, else the working directory.
std::string OutputRoot();

// Evaluates the archive's average policy: exact exploitability for Kuhn and
// Leduc, a probe-match lower bound for flop hold'em.
EvalRow EvaluateTrainer(const Trainer& trainer, const ExperimentConfig& config,
                        const std::string& run_id);

struct RunOptions {
  bool resume = true;
  // Return after this many new iterations (simulates an interruption).
  int stop_after = -1;
  bool verbose = false;
};

// Trains one seed, writing manifest.json, eval.csv (or eval.jsonl) and a
// checkpoint under <root>/<output_dir>/<run_id>/seed_<seed>.
RunManifest RunTrainSeed(const ExperimentConfig& config, uint64_t seed,
                         const RunOptions& options = {});

struct SeedSummary {
  int iteration = 0;
  double mean_nodes = 0.0;
  double mean_mbb = 0.0;
  double std_mbb = 0.0;
  int runs = 0;
};

// Runs config.seeds seeds (seed, seed + 1, ...) and writes summary.csv with
// the mean and standard deviation of each evaluation across seeds.
std::vector<RunManifest> RunTrain(const ExperimentConfig& config,
                                  const RunOptions& options = {});
std::vector<SeedSummary> SummarizeSeeds(const std::vector<RunManifest>& runs);

struct AblationRow {
  std::string variant;
  double mean_nodes = 0.0;
  double mean_iterations = 0.0;
  double mean_mbb = 0.0;
  double std_mbb = 0.0;
};

const std::vector<std::string>& AblationSuites();
// Variant configs of a suite; throws InvalidInputError for unknown suites.
std::vector<std::pair<std::string, ExperimentConfig>> AblationVariants(
    std::string_view suite, const ExperimentConfig& base);
std::vector<AblationRow> RunAblation(std::string_view suite,
                                     const ExperimentConfig& base,
                                     const RunOptions& options = {});
std::string FormatAblationTable(const std::vector<AblationRow>& rows);

}  // namespace dreamcfr

#endif  // DREAMCFR_HARNESS_H_
