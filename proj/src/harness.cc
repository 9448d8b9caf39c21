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

#include "dreamcfr/harness.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/game_tree.h"
#include "json.hpp"

namespace dreamcfr {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr char kPublished[] = "published";
constexpr char kArtifact[] = "artifact default";
constexpr char kDesk[] = "desk profile";
constexpr char kUser[] = "config";

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int64_t ParseInt(const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigValidationError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

int ParseSmallInt(const std::string& key, const std::string& v) {
  const int64_t x = ParseInt(key, v);
  if (x > std::numeric_limits<int>::max() ||
      x < std::numeric_limits<int>::min()) {
    throw ConfigValidationError(key, "out of range");
  }
  return static_cast<int>(x);
}

double ParseReal(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    throw ConfigValidationError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& v) {
  const std::string s = Lower(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigValidationError(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> SplitList(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& v, F fmt) {
  std::string out;
  for (size_t k = 0; k < v.size(); ++k) {
    if (k) out += ",";
    out += fmt(v[k]);
  }
  return out;
}

const char* WeightingName(Weighting w) {
  return w == Weighting::kLinear ? "linear" : "vanilla";
}

struct KeySpec {
  const char* name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define INT_KEY(field)                                                     \
  KeySpec {                                                                \
    #field,                                                                \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }, \
        [](ExperimentConfig& c, const std::string& v) {                    \
          c.field = ParseSmallInt(#field, v);                              \
        }                                                                  \
  }
#define TRAINER_INT_KEY(field)                                     \
  KeySpec {                                                        \
    #field,                                                        \
        [](const ExperimentConfig& c) {                            \
          return std::to_string(c.trainer.field);                  \
        },                                                         \
        [](ExperimentConfig& c, const std::string& v) {            \
          c.trainer.field = static_cast<decltype(c.trainer.field)>( \
              ParseInt(#field, v));                                \
        }                                                          \
  }
#define TRAINER_REAL_KEY(field)                                            \
  KeySpec {                                                                \
    #field,                                                                \
        [](const ExperimentConfig& c) { return FormatDouble(c.trainer.field); }, \
        [](ExperimentConfig& c, const std::string& v) {                    \
          c.trainer.field = ParseReal(#field, v);                          \
        }                                                                  \
  }

const std::vector<KeySpec>& Keys() {
  static const std::vector<KeySpec> keys = {
      {"game", [](const ExperimentConfig& c) { return std::string(GameName(c.trainer.game)); },
       [](ExperimentConfig&, const std::string&) {}},
      {"algorithm",
       [](const ExperimentConfig& c) { return std::string(AlgorithmName(c.trainer.algorithm)); },
       [](ExperimentConfig&, const std::string&) {}},
      {"profile",
       [](const ExperimentConfig& c) {
         return std::string(c.profile == Profile::kDesk ? "desk" : "paper");
       },
       [](ExperimentConfig&, const std::string&) {}},
      TRAINER_REAL_KEY(epsilon),
      TRAINER_INT_KEY(traversals),
      {"weighting",
       [](const ExperimentConfig& c) { return std::string(WeightingName(c.trainer.weighting)); },
       [](ExperimentConfig& c, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "linear") {
           c.trainer.weighting = Weighting::kLinear;
         } else if (s == "vanilla") {
           c.trainer.weighting = Weighting::kVanilla;
         } else {
           throw ConfigValidationError("weighting", "expected linear or vanilla");
         }
       }},
      {"reset",
       [](const ExperimentConfig& c) { return std::string(ResetModeName(c.trainer.reset)); },
       [](ExperimentConfig& c, const std::string& v) {
         try {
           c.trainer.reset = ParseResetMode(v);
         } catch (const InvalidInputError&) {
           throw ConfigValidationError("reset", "expected Always, Never or Every10");
         }
       }},
      TRAINER_INT_KEY(iterations),
      {"seed", [](const ExperimentConfig& c) { return std::to_string(c.trainer.seed); },
       [](ExperimentConfig& c, const std::string& v) {
         const int64_t s = ParseInt("seed", v);
         if (s < 0) throw ConfigValidationError("seed", "must be non-negative");
         c.trainer.seed = static_cast<uint64_t>(s);
       }},
      TRAINER_INT_KEY(adv_batches_scratch),
      TRAINER_INT_KEY(adv_batches_finetune),
      TRAINER_INT_KEY(adv_batch_size),
      TRAINER_INT_KEY(q_batches),
      TRAINER_INT_KEY(q_batch_size),
      TRAINER_REAL_KEY(lr),
      TRAINER_REAL_KEY(clip),
      TRAINER_INT_KEY(adv_capacity),
      TRAINER_INT_KEY(q_capacity),
      {"avg_net", [](const ExperimentConfig& c) { return std::string(c.trainer.avg_net ? "true" : "false"); },
       [](ExperimentConfig& c, const std::string& v) { c.trainer.avg_net = ParseBool("avg_net", v); }},
      TRAINER_INT_KEY(avg_capacity),
      TRAINER_INT_KEY(avg_batches),
      TRAINER_INT_KEY(avg_batch_size),
      {"q_stored_policy",
       [](const ExperimentConfig& c) { return std::string(c.trainer.q_stored_policy ? "true" : "false"); },
       [](ExperimentConfig& c, const std::string& v) {
         c.trainer.q_stored_policy = ParseBool("q_stored_policy", v);
       }},
      TRAINER_INT_KEY(hidden_width),
      TRAINER_INT_KEY(hidden_layers),
      TRAINER_REAL_KEY(value_scale),
      INT_KEY(eval_every),
      {"output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
       [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      {"run_id", [](const ExperimentConfig& c) { return c.run_id; },
       [](ExperimentConfig& c, const std::string& v) { c.run_id = v; }},
      {"log_format",
       [](const ExperimentConfig& c) {
         return std::string(c.log_format == LogFormat::kCsv ? "csv" : "jsonl");
       },
       [](ExperimentConfig& c, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "csv") {
           c.log_format = LogFormat::kCsv;
         } else if (s == "jsonl") {
           c.log_format = LogFormat::kJsonl;
         } else {
           throw ConfigValidationError("log_format", "expected csv or jsonl");
         }
       }},
      {"deterministic",
       [](const ExperimentConfig& c) { return std::string(c.deterministic ? "true" : "false"); },
       [](ExperimentConfig& c, const std::string& v) {
         c.deterministic = ParseBool("deterministic", v);
       }},
      INT_KEY(seeds),
      INT_KEY(big_blind),
      INT_KEY(checkpoint_every),
      {"probe_hands", [](const ExperimentConfig& c) { return std::to_string(c.probe_hands); },
       [](ExperimentConfig& c, const std::string& v) { c.probe_hands = ParseInt("probe_hands", v); }},
      {"node_budget", [](const ExperimentConfig& c) { return std::to_string(c.node_budget); },
       [](ExperimentConfig& c, const std::string& v) { c.node_budget = ParseInt("node_budget", v); }},
      {"epsilon_grid",
       [](const ExperimentConfig& c) { return JoinList(c.epsilon_grid, FormatDouble); },
       [](ExperimentConfig& c, const std::string& v) {
         c.epsilon_grid.clear();
         for (const auto& s : SplitList(v)) c.epsilon_grid.push_back(ParseReal("epsilon_grid", s));
       }},
      {"traversal_grid",
       [](const ExperimentConfig& c) {
         return JoinList(c.traversal_grid, [](int x) { return std::to_string(x); });
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.traversal_grid.clear();
         for (const auto& s : SplitList(v)) c.traversal_grid.push_back(ParseSmallInt("traversal_grid", s));
       }},
      {"q_batch_grid",
       [](const ExperimentConfig& c) {
         return JoinList(c.q_batch_grid, [](int x) { return std::to_string(x); });
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.q_batch_grid.clear();
         for (const auto& s : SplitList(v)) c.q_batch_grid.push_back(ParseSmallInt("q_batch_grid", s));
       }},
  };
  return keys;
}

#undef INT_KEY
#undef TRAINER_INT_KEY
#undef TRAINER_REAL_KEY

void ApplyDefaults(ExperimentConfig& c) {
  TrainerConfig& t = c.trainer;
  auto& o = c.origin;
  for (const KeySpec& k : Keys()) o[k.name] = kArtifact;
  const bool leduc = t.game == GameId::kLeduc;
  const bool fhp = t.game == GameId::kFhp;
  const bool es = t.algorithm == Algorithm::kEsSdCfr;

  if (fhp) {
    t.traversals = es ? 10000 : 50000;
    if (t.algorithm != Algorithm::kOsSdCfr) o["traversals"] = kPublished;
  } else if (leduc) {
    t.traversals = es ? 346 : 900;
    if (t.algorithm != Algorithm::kOsSdCfr) o["traversals"] = kPublished;
  } else {
    t.traversals = es ? 38 : 100;
  }
  t.adv_capacity = fhp ? 40'000'000 : 2'000'000;
  t.adv_batches_scratch = fhp ? 10000 : 3000;
  t.adv_batch_size = 2048;
  if (leduc || fhp) {
    o["adv_capacity"] = kPublished;
    o["adv_batches_scratch"] = kPublished;
  }
  if (leduc) o["adv_batch_size"] = kPublished;
  t.adv_batches_finetune = 500;
  t.q_batches = 1000;
  t.q_batch_size = 512;
  t.q_capacity = 200'000;
  t.lr = 1e-3;
  t.clip = 1.0;
  t.avg_capacity = 2'000'000;
  t.avg_batches = 4000;
  t.avg_batch_size = 2048;
  t.weighting = Weighting::kLinear;
  t.reset = ResetMode::kAlways;
  for (const char* k :
       {"adv_batches_finetune", "q_batches", "q_batch_size", "q_capacity", "lr",
        "clip", "avg_capacity", "avg_batches", "avg_batch_size", "weighting",
        "reset", "seeds"}) {
    o[k] = kPublished;
  }
  c.seeds = 3;

  if (c.profile == Profile::kDesk) {
    t.adv_capacity /= 100;
    t.q_capacity /= 100;
    t.avg_capacity /= 100;
    t.adv_batches_scratch /= 10;
    t.adv_batches_finetune /= 10;
    t.q_batches /= 10;
    t.avg_batches /= 10;
    for (const char* k : {"adv_capacity", "q_capacity", "avg_capacity",
                          "adv_batches_scratch", "adv_batches_finetune",
                          "q_batches", "avg_batches"}) {
      o[k] = kDesk;
    }
  }
}

void ValidateExperiment(const ExperimentConfig& c) {
  c.trainer.Validate();
  auto positive = [](const char* key, int64_t v) {
    if (v <= 0) throw ConfigValidationError(key, "must be positive");
  };
  positive("eval_every", c.eval_every);
  positive("seeds", c.seeds);
  positive("big_blind", c.big_blind);
  positive("probe_hands", c.probe_hands);
  if (c.checkpoint_every < 0) {
    throw ConfigValidationError("checkpoint_every", "must be non-negative");
  }
  if (c.node_budget < 0) {
    throw ConfigValidationError("node_budget", "must be non-negative");
  }
  if (c.run_id.empty() ||
      c.run_id.find_first_of("/\\") != std::string::npos || c.run_id == "." ||
      c.run_id == "..") {
    throw ConfigValidationError("run_id", "must be a plain directory name");
  }
  if (c.output_dir.empty()) {
    throw ConfigValidationError("output_dir", "must not be empty");
  }
  if (c.epsilon_grid.empty()) {
    throw ConfigValidationError("epsilon_grid", "must not be empty");
  }
  for (double e : c.epsilon_grid) {
    if (!(e > 0.0 && e <= 1.0)) {
      throw ConfigValidationError("epsilon_grid", "values must lie in (0, 1]");
    }
  }
  if (c.traversal_grid.empty()) {
    throw ConfigValidationError("traversal_grid", "must not be empty");
  }
  for (int v : c.traversal_grid) positive("traversal_grid", v);
  if (c.q_batch_grid.empty()) {
    throw ConfigValidationError("q_batch_grid", "must not be empty");
  }
  for (int v : c.q_batch_grid) positive("q_batch_grid", v);
}

json ReportJson(const IterationReport& r) {
  json j;
  j["iteration"] = r.iteration;
  j["traverser"] = r.traverser;
  j["nodes_touched"] = r.nodes_touched;
  j["total_nodes_touched"] = r.total_nodes_touched;
  j["adv_buffer_size"] = r.adv_buffer_size;
  j["q_buffer_size"] = r.q_buffer_size;
  j["q_loss"] = r.q_loss;
  j["d_loss"] = r.d_loss;
  j["d_reset"] = r.d_reset;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

IterationReport ReportFromJson(const json& j) {
  IterationReport r;
  r.iteration = j.at("iteration");
  r.traverser = j.at("traverser");
  r.nodes_touched = j.at("nodes_touched");
  r.total_nodes_touched = j.at("total_nodes_touched");
  r.adv_buffer_size = j.at("adv_buffer_size");
  r.q_buffer_size = j.at("q_buffer_size");
  r.q_loss = j.at("q_loss");
  r.d_loss = j.at("d_loss");
  r.d_reset = j.at("d_reset");
  r.wall_time_s = j.at("wall_time_s");
  return r;
}

json NumberOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double NumberFromJson(const json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

json EvalJson(const EvalRow& r) {
  json j;
  j["run_id"] = r.run_id;
  j["iteration"] = r.iteration;
  j["nodes_touched"] = r.nodes_touched;
  j["exploitability_mbb"] = NumberOrNull(r.exploitability_mbb);
  j["br_value_p1"] = NumberOrNull(r.br_value_p1);
  j["br_value_p2"] = NumberOrNull(r.br_value_p2);
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

EvalRow EvalFromJson(const json& j) {
  EvalRow r;
  r.run_id = j.at("run_id");
  r.iteration = j.at("iteration");
  r.nodes_touched = j.at("nodes_touched");
  r.exploitability_mbb = NumberFromJson(j.at("exploitability_mbb"));
  r.br_value_p1 = NumberFromJson(j.at("br_value_p1"));
  r.br_value_p2 = NumberFromJson(j.at("br_value_p2"));
  r.wall_time_s = j.at("wall_time_s");
  return r;
}

json ConfigJson(const ExperimentConfig& c) {
  json j;
  for (const KeySpec& k : Keys()) j[k.name] = k.get(c);
  return j;
}

void WriteFile(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

void WriteManifest(const fs::path& dir, const ExperimentConfig& config,
                   const RunManifest& m, const std::string& error = "") {
  json j;
  j["format"] = "dreamcfr-manifest-1";
  j["version"] = kVersion;
  j["run_id"] = m.run_id;
  j["seed"] = m.seed;
  j["status"] = m.status;
  if (!error.empty()) j["error"] = error;
  j["config"] = ConfigJson(config);
  j["iterations"] = json::array();
  for (const auto& r : m.iterations) j["iterations"].push_back(ReportJson(r));
  j["evaluations"] = json::array();
  for (const auto& r : m.evaluations) j["evaluations"].push_back(EvalJson(r));
  WriteFile(dir / "manifest.json", j.dump(2) + "\n");
  if (config.log_format == LogFormat::kCsv) {
    WriteFile(dir / "eval.csv", FormatEvalCsv(m.evaluations));
  } else {
    std::string lines;
    for (const auto& r : m.evaluations) lines += EvalJson(r).dump() + "\n";
    WriteFile(dir / "eval.jsonl", lines);
  }
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single value.
double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentConfig ParseConfig(std::string_view text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    const std::string content = Trim(raw.substr(0, hash));
    if (content.empty()) continue;
    const size_t eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError(line, "expected 'key = value'");
    }
    const std::string key = Trim(content.substr(0, eq));
    const std::string value = Trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigParseError(line, "missing key");
    if (value.empty()) throw ConfigParseError(line, "missing value for " + key);
    if (entries.count(key)) {
      throw ConfigParseError(line, "duplicate key " + key + " (first on line " +
                                       std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, line};
    order.push_back(key);
  }

  std::set<std::string> known;
  for (const KeySpec& k : Keys()) known.insert(k.name);
  for (const std::string& key : order) {
    if (!known.count(key)) throw ConfigValidationError(key, "unknown key");
  }

  ExperimentConfig c;
  if (auto it = entries.find("game"); it != entries.end()) {
    try {
      c.trainer.game = ParseGameId(Lower(it->second.value));
    } catch (const Error&) {
      throw ConfigValidationError("game", "expected kuhn, leduc or fhp");
    }
  }
  if (auto it = entries.find("algorithm"); it != entries.end()) {
    try {
      c.trainer.algorithm = ParseAlgorithm(it->second.value);
    } catch (const InvalidInputError&) {
      throw ConfigValidationError("algorithm",
                                  "expected DREAM, OS-SD-CFR or ES-SD-CFR");
    }
  }
  if (auto it = entries.find("profile"); it != entries.end()) {
    const std::string p = Lower(it->second.value);
    if (p == "paper") {
      c.profile = Profile::kPaper;
    } else if (p == "desk") {
      c.profile = Profile::kDesk;
    } else {
      throw ConfigValidationError("profile", "expected paper or desk");
    }
  }
  ApplyDefaults(c);
  for (const KeySpec& k : Keys()) {
    auto it = entries.find(k.name);
    if (it == entries.end()) continue;
    k.set(c, it->second.value);
    c.origin[k.name] = kUser;
  }
  ValidateExperiment(c);
  return c;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string PrintConfig(const ExperimentConfig& config) {
  std::string out;
  for (const KeySpec& k : Keys()) {
    auto it = config.origin.find(k.name);
    const std::string origin = it == config.origin.end() ? kArtifact : it->second;
    out += std::string(k.name) + " = " + k.get(config) + "  # " + origin + "\n";
  }
  return out;
}

std::string FormatEvalCsv(const std::vector<EvalRow>& rows) {
  std::string out = std::string(kEvalCsvHeader) + "\n";
  for (const EvalRow& r : rows) {
    out += r.run_id + "," + std::to_string(r.iteration) + "," +
           std::to_string(r.nodes_touched) + "," +
           FormatDouble(r.exploitability_mbb) + "," +
           FormatDouble(r.br_value_p1) + "," + FormatDouble(r.br_value_p2) +
           "," + FormatDouble(r.wall_time_s) + "\n";
  }
  return out;
}

std::string OutputRoot() {
  const char* env = std::getenv("DREAMCFR_OUTPUT_ROOT");
  if (env != nullptr && *env != '\0') return env;
  return fs::current_path().string();
}

EvalRow EvaluateTrainer(const Trainer& trainer, const ExperimentConfig& config,
                        const std::string& run_id) {
  EvalRow row;
  row.run_id = run_id;
  row.iteration = trainer.last_iteration();
  row.nodes_touched = trainer.total_nodes_touched();
  const GameId game = trainer.config().game;
  if (game == GameId::kFhp) {
    const ArchivePolicy policy(trainer.archive(), trainer.archive_weighting());
    const ProbeEvaluation probe = EvaluateAgainstProbes(
        game, policy, config.probe_hands,
        MixSeed(trainer.config().seed, static_cast<uint64_t>(row.iteration)),
        config.big_blind);
    row.exploitability_mbb = probe.lower_bound_mbb;
    row.br_value_p1 = std::nan("");
    row.br_value_p2 = std::nan("");
    return row;
  }
  static const GameTree kuhn = GameTree::Build(GameId::kKuhn);
  static const GameTree leduc = GameTree::Build(GameId::kLeduc);
  const GameTree& tree = game == GameId::kKuhn ? kuhn : leduc;
  const TabularPolicy avg = ArchiveAveragePolicy(tree, trainer.archive(),
                                                 trainer.archive_weighting());
  const ExploitabilityResult e = Exploitability(tree, avg, config.big_blind);
  row.exploitability_mbb = e.mbb;
  row.br_value_p1 = e.br_value[0];
  row.br_value_p2 = e.br_value[1];
  return row;
}

RunManifest RunTrainSeed(const ExperimentConfig& config, uint64_t seed,
                         const RunOptions& options) {
  ValidateExperiment(config);
  const fs::path dir = fs::path(OutputRoot()) / config.output_dir /
                       config.run_id / ("seed_" + std::to_string(seed));
  const fs::path ckpt = dir / "checkpoint";
  fs::create_directories(dir);

  ExperimentConfig run_config = config;
  run_config.trainer.seed = seed;
  RunManifest m;
  m.run_id = config.run_id;
  m.seed = seed;
  m.directory = dir.string();

  std::optional<Trainer> trainer;
  double wall_offset = 0.0;
  if (options.resume && fs::exists(ckpt / "state.bin") &&
      fs::exists(dir / "manifest.json")) {
    trainer.emplace(Trainer::LoadCheckpoint(ckpt.string()));
    if (!(trainer->config() == run_config.trainer)) {
      throw InvalidInputError("checkpoint in " + ckpt.string() +
                              " was written with a different configuration");
    }
    std::ifstream in(dir / "manifest.json");
    const json j = json::parse(in);
    for (const auto& r : j.at("iterations")) {
      IterationReport rep = ReportFromJson(r);
      if (rep.iteration <= trainer->last_iteration()) m.iterations.push_back(rep);
    }
    for (const auto& r : j.at("evaluations")) {
      EvalRow row = EvalFromJson(r);
      if (row.iteration <= trainer->last_iteration()) m.evaluations.push_back(row);
    }
    if (!m.evaluations.empty()) wall_offset = m.evaluations.back().wall_time_s;
  } else {
    trainer.emplace(run_config.trainer);
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    if (config.deterministic) return 0.0;
    return wall_offset + std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  };
  auto finished = [&] {
    return trainer->last_iteration() >= config.trainer.iterations ||
           (config.node_budget > 0 &&
            trainer->total_nodes_touched() >= config.node_budget);
  };

  int done = 0;
  while (!finished()) {
    if (options.stop_after >= 0 && done >= options.stop_after) return m;
    IterationReport report;
    try {
      report = trainer->RunIteration();
    } catch (const DivergenceError& e) {
      m.status = "diverged";
      WriteManifest(dir, run_config, m, e.what());
      throw;
    }
    ++done;
    if (config.deterministic) report.wall_time_s = 0.0;
    m.iterations.push_back(report);
    const int t = report.iteration;
    if (t % config.eval_every == 0 || finished()) {
      EvalRow row = EvaluateTrainer(*trainer, run_config, config.run_id);
      row.wall_time_s = elapsed();
      m.evaluations.push_back(row);
      if (options.verbose) {
        std::cerr << config.run_id << " seed " << seed << " t=" << t
                  << " nodes=" << row.nodes_touched
                  << " exploitability=" << row.exploitability_mbb << " mbb/g\n";
      }
    }
    if (config.checkpoint_every > 0 && t % config.checkpoint_every == 0) {
      trainer->SaveCheckpoint(ckpt.string());
    }
    WriteManifest(dir, run_config, m);
  }
  if (m.evaluations.empty() ||
      m.evaluations.back().iteration != trainer->last_iteration()) {
    EvalRow row = EvaluateTrainer(*trainer, run_config, config.run_id);
    row.wall_time_s = elapsed();
    m.evaluations.push_back(row);
  }
  m.status = "complete";
  trainer->SaveCheckpoint(ckpt.string());
  WriteManifest(dir, run_config, m);
  return m;
}

std::vector<SeedSummary> SummarizeSeeds(const std::vector<RunManifest>& runs) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_iter;
  for (const RunManifest& m : runs) {
    for (const EvalRow& r : m.evaluations) {
      by_iter[r.iteration].first.push_back(static_cast<double>(r.nodes_touched));
      by_iter[r.iteration].second.push_back(r.exploitability_mbb);
    }
  }
  std::vector<SeedSummary> out;
  for (const auto& [it, v] : by_iter) {
    SeedSummary s;
    s.iteration = it;
    s.mean_nodes = Mean(v.first);
    s.mean_mbb = Mean(v.second);
    s.std_mbb = StdDev(v.second);
    s.runs = static_cast<int>(v.second.size());
    out.push_back(s);
  }
  return out;
}

std::vector<RunManifest> RunTrain(const ExperimentConfig& config,
                                  const RunOptions& options) {
  ValidateExperiment(config);
  std::vector<RunManifest> runs;
  for (int s = 0; s < config.seeds; ++s) {
    runs.push_back(RunTrainSeed(
        config, config.trainer.seed + static_cast<uint64_t>(s), options));
  }
  std::string csv = "iteration,runs,mean_nodes_touched,mean_exploitability_mbb,std_exploitability_mbb\n";
  for (const SeedSummary& s : SummarizeSeeds(runs)) {
    csv += std::to_string(s.iteration) + "," + std::to_string(s.runs) + "," +
           FormatDouble(s.mean_nodes) + "," + FormatDouble(s.mean_mbb) + "," +
           FormatDouble(s.std_mbb) + "\n";
  }
  WriteFile(fs::path(OutputRoot()) / config.output_dir / config.run_id /
                "summary.csv",
            csv);
  return runs;
}

const std::vector<std::string>& AblationSuites() {
  static const std::vector<std::string> suites = {
      "epsilon-sweep", "traversal-sweep", "q-batch-sweep", "reset-mode",
      "baseline-vs-none"};
  return suites;
}

std::vector<std::pair<std::string, ExperimentConfig>> AblationVariants(
    std::string_view suite, const ExperimentConfig& base) {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  auto add = [&](const std::string& name, auto modify) {
    ExperimentConfig c = base;
    c.trainer.algorithm = Algorithm::kDream;
    modify(c);
    c.run_id = base.run_id + "-" + std::string(suite) + "-" + name;
    out.emplace_back(name, std::move(c));
  };
  if (suite == "epsilon-sweep") {
    for (double e : base.epsilon_grid) {
      add("epsilon=" + FormatDouble(e), [e](ExperimentConfig& c) { c.trainer.epsilon = e; });
    }
  } else if (suite == "traversal-sweep") {
    for (int n : base.traversal_grid) {
      add("traversals=" + std::to_string(n),
          [n](ExperimentConfig& c) { c.trainer.traversals = n; });
    }
  } else if (suite == "q-batch-sweep") {
    for (int n : base.q_batch_grid) {
      add("q_batches=" + std::to_string(n),
          [n](ExperimentConfig& c) { c.trainer.q_batches = n; });
    }
  } else if (suite == "reset-mode") {
    for (ResetMode m : {ResetMode::kAlways, ResetMode::kNever, ResetMode::kEvery10}) {
      add(ResetModeName(m), [m](ExperimentConfig& c) { c.trainer.reset = m; });
    }
  } else if (suite == "baseline-vs-none") {
    add("DREAM", [](ExperimentConfig&) {});
    add("OS-SD-CFR", [](ExperimentConfig& c) {
      c.trainer.algorithm = Algorithm::kOsSdCfr;
    });
  } else {
    throw InvalidInputError("unknown ablation suite: " + std::string(suite));
  }
  return out;
}

std::vector<AblationRow> RunAblation(std::string_view suite,
                                     const ExperimentConfig& base,
                                     const RunOptions& options) {
  std::vector<AblationRow> rows;
  for (const auto& [name, config] : AblationVariants(suite, base)) {
    const std::vector<RunManifest> runs = RunTrain(config, options);
    std::vector<double> nodes, iters, mbb;
    for (const RunManifest& m : runs) {
      const EvalRow& last = m.evaluations.back();
      nodes.push_back(static_cast<double>(last.nodes_touched));
      iters.push_back(last.iteration);
      mbb.push_back(last.exploitability_mbb);
    }
    rows.push_back({name, Mean(nodes), Mean(iters), Mean(mbb), StdDev(mbb)});
  }
  std::string csv = "variant,mean_iterations,mean_nodes_touched,mean_exploitability_mbb,std_exploitability_mbb\n";
  for (const AblationRow& r : rows) {
    csv += r.variant + "," + FormatDouble(r.mean_iterations) + "," +
           FormatDouble(r.mean_nodes) + "," + FormatDouble(r.mean_mbb) + "," +
           FormatDouble(r.std_mbb) + "\n";
  }
  const fs::path dir = fs::path(OutputRoot()) / base.output_dir;
  fs::create_directories(dir);
  WriteFile(dir / (base.run_id + "-" + std::string(suite) + ".csv"), csv);
  return rows;
}

std::string FormatAblationTable(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "variant" << std::right << std::setw(12)
      << "iterations" << std::setw(14) << "nodes" << std::setw(14) << "mbb/g"
      << std::setw(12) << "std" << "\n";
  out << std::fixed;
  for (const AblationRow& r : rows) {
    out << std::left << std::setw(18) << r.variant << std::right
        << std::setw(12) << std::setprecision(1) << r.mean_iterations
        << std::setw(14) << std::setprecision(0) << r.mean_nodes
        << std::setw(14) << std::setprecision(2) << r.mean_mbb << std::setw(12)
        << r.std_mbb << "\n";
  }
  return out.str();
}

}  // namespace dreamcfr
