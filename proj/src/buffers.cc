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

#include "dreamcfr/buffers.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace dreamcfr {
namespace {

template <size_t N>
void WriteArray(BinaryWriter& w, const std::array<float, N>& a) {
  for (float x : a) w.F32(x);
}

template <size_t N>
void ReadArray(BinaryReader& r, std::array<float, N>& a) {
  for (float& x : a) x = r.F32();
}

std::string EntryFile(int agent, int iteration) {
  char name[64];
  std::snprintf(name, sizeof(name), "agent%d_iter%06d.drmnet", agent,
                iteration);
  return name;
}

}  // namespace

void WriteSample(BinaryWriter& w, const AdvantageSample& s) {
  w.Floats(s.features);
  WriteArray(w, s.targets);
  WriteArray(w, s.mask);
  w.I64(s.iteration);
  w.F32(s.weight);
}

AdvantageSample ReadSample(BinaryReader& r) {
  AdvantageSample s;
  s.features = r.Floats();
  ReadArray(r, s.targets);
  ReadArray(r, s.mask);
  s.iteration = static_cast<int>(r.I64());
  s.weight = r.F32();
  return s;
}

void WriteTransition(BinaryWriter& w, const QTransition& q) {
  w.Floats(q.joint_features);
  w.I64(q.action);
  w.F32(q.reward);
  w.U64(q.terminal ? 1 : 0);
  w.I64(q.next_actor);
  w.Floats(q.next_joint_features);
  w.Floats(q.next_features);
  WriteArray(w, q.next_mask);
  WriteArray(w, q.next_policy);
}

QTransition ReadTransition(BinaryReader& r) {
  QTransition q;
  q.joint_features = r.Floats();
  q.action = static_cast<int>(r.I64());
  q.reward = r.F32();
  q.terminal = r.U64() != 0;
  q.next_actor = static_cast<int>(r.I64());
  q.next_joint_features = r.Floats();
  q.next_features = r.Floats();
  ReadArray(r, q.next_mask);
  ReadArray(r, q.next_policy);
  return q;
}

void ModelArchive::Add(int agent, int iteration, MlpParams params) {
  if (agent != 0 && agent != 1) throw InvalidInputError("agent must be 0 or 1");
  auto& list = entries_[agent];
  if (!list.empty() && list.back().iteration >= iteration) {
    throw InvalidInputError("archive iterations must increase");
  }
  list.push_back({iteration, std::move(params)});
}

std::vector<double> ModelArchive::SamplingWeights(
    int agent, ArchiveWeighting weighting) const {
  const auto& list = entries_.at(agent);
  std::vector<double> w(list.size());
  for (size_t k = 0; k < list.size(); ++k) {
    w[k] = weighting == ArchiveWeighting::kLinear ? list[k].iteration : 1.0;
  }
  return w;
}

const ArchiveEntry& ModelArchive::Sample(int agent, Rng& rng,
                                         ArchiveWeighting weighting) const {
  const auto& list = entries_.at(agent);
  if (list.empty()) throw InvalidInputError("archive is empty");
  return list[rng.SampleIndex(SamplingWeights(agent, weighting))];
}

void ModelArchive::Save(const std::string& dir, GameId game) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json index;
  index["format"] = "DRMNET1";
  index["game"] = GameName(game);
  index["entries"] = nlohmann::json::array();
  for (int agent = 0; agent < 2; ++agent) {
    for (const ArchiveEntry& e : entries_[agent]) {
      const std::string file = EntryFile(agent, e.iteration);
      SaveMlpFile((fs::path(dir) / file).string(), game, e.params);
      index["entries"].push_back({{"agent", agent},
                                  {"iteration", e.iteration},
                                  {"file", file},
                                  {"uniform_weight", 1},
                                  {"linear_weight", e.iteration}});
    }
  }
  std::ofstream out(fs::path(dir) / "index.json", std::ios::trunc);
  if (!out) throw Error("cannot write archive index in " + dir);
  out << index.dump(2) << "\n";
}

ModelArchive ModelArchive::Load(const std::string& dir, GameId* game) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "index.json");
  if (!in) throw InvalidInputError("no archive index in " + dir);
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("bad archive index: ") + e.what());
  }
  const GameId id = ParseGameId(index.at("game").get<std::string>());
  if (game != nullptr) *game = id;
  ModelArchive archive;
  for (const auto& e : index.at("entries")) {
    GameId file_game;
    MlpParams params = LoadMlpFile(
        (fs::path(dir) / e.at("file").get<std::string>()).string(), &file_game);
    if (file_game != id) throw InvalidInputError("archive mixes games");
    archive.Add(e.at("agent").get<int>(), e.at("iteration").get<int>(),
                std::move(params));
  }
  return archive;
}

}  // namespace dreamcfr
