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

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dreamcfr/buffers.h"
#include "dreamcfr/errors.h"
#include "test_util.h"

namespace dreamcfr {
namespace {

TEST_CASE("reservoir basics") {
  Rng rng(1);
  ReservoirBuffer<std::string> buf(2);
  buf.Add("a", rng);
  buf.Add("b", rng);
  CHECK(buf.items() == std::vector<std::string>{"a", "b"});
  for (int k = 0; k < 50; ++k) {
    buf.Add("x", rng);
    CHECK(buf.size() <= buf.capacity());
    CHECK(buf.seen() >= buf.size());
  }
  CHECK(buf.seen() == 52);
}

TEST_CASE("reservoir retention is uniform") {
  const int n = 10000, capacity = 100, reps = 1000;
  std::vector<int> kept(n, 0);
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(MixSeed(99, rep));
    ReservoirBuffer<int> buf(capacity);
    for (int i = 0; i < n; ++i) buf.Add(i, rng);
    for (int i : buf.items()) ++kept[i];
  }
  // Blocks of 100 consecutive insertions.
  for (int block = 0; block < n / 100; ++block) {
    double total = 0;
    for (int i = block * 100; i < (block + 1) * 100; ++i) total += kept[i];
    const double p = total / (100.0 * reps);
    CHECK(std::abs(p - 0.01) < 0.003);
  }

  const int items = 10, draws = 20000;
  std::vector<int> last(items, 0);
  for (int rep = 0; rep < draws; ++rep) {
    Rng rng(MixSeed(5, rep));
    ReservoirBuffer<int> one(1);
    for (int i = 0; i < items; ++i) one.Add(i, rng);
    ++last[one[0]];
  }
  for (int c : last) CHECK(std::abs(c / double(draws) - 0.1) < 0.01);

  CHECK(testing::ReservoirChiSquare(1000, 100, 1000, 4).p_value > 0.001);
}

TEST_CASE("circular buffer") {
  CircularBuffer<char> buf(2);
  buf.Push('a');
  buf.Push('b');
  buf.Push('c');
  CHECK(buf.Items() == std::vector<char>{'b', 'c'});
  CircularBuffer<char> three(3);
  three.Push('a');
  three.Push('b');
  CHECK(three.Items() == std::vector<char>{'a', 'b'});
  CircularBuffer<int> ring(5);
  for (int i = 0; i < 23; ++i) {
    ring.Push(i);
    CHECK(ring.size() <= 5);
  }
  CHECK(ring.Items() == std::vector<int>{18, 19, 20, 21, 22});
}

TEST_CASE("sample serialization") {
  AdvantageSample s{{0.5f, -1.0f}, {1, 2, 3}, {0, 1, 1}, 7, 2.5f};
  QTransition q;
  q.joint_features = {1, 0, 1};
  q.action = 2;
  q.reward = -50;
  q.next_actor = 1;
  q.next_features = {0.25f};
  q.next_mask = {1, 1, 0};
  std::stringstream io;
  BinaryWriter w(io);
  WriteSample(w, s);
  WriteTransition(w, q);
  BinaryReader r(io);
  CHECK(ReadSample(r) == s);
  CHECK(ReadTransition(r) == q);
}

TEST_CASE("archive sampling") {
  ModelArchive archive;
  for (int t = 1; t <= 3; ++t) archive.Add(0, t, MlpInit({2, 2}, t));
  CHECK_THROWS_AS(archive.Add(0, 3, MlpInit({2, 2}, 9)), InvalidInputError);
  Rng rng(12);
  CHECK_THROWS_AS(archive.Sample(1, rng, ArchiveWeighting::kLinear), InvalidInputError);
  CHECK(archive.SamplingWeights(0, ArchiveWeighting::kLinear) == std::vector<double>{1, 2, 3});

  const int draws = 60000;
  for (auto weighting : {ArchiveWeighting::kLinear, ArchiveWeighting::kUniform}) {
    std::vector<int> count(4, 0);
    for (int k = 0; k < draws; ++k) ++count[archive.Sample(0, rng, weighting).iteration];
    for (int t = 1; t <= 3; ++t) {
      const double expected = weighting == ArchiveWeighting::kLinear ? t / 6.0 : 1.0 / 3;
      CHECK(std::abs(count[t] / double(draws) - expected) < 0.01);
    }
  }
  ModelArchive single;
  single.Add(1, 4, MlpInit({2, 2}, 4));
  for (int k = 0; k < 10; ++k) {
    CHECK(single.Sample(1, rng, ArchiveWeighting::kLinear).iteration == 4);
  }
}

TEST_CASE("archive round trip") {
  namespace fs = std::filesystem;
  ModelArchive archive;
  for (int t = 1; t <= 4; ++t) archive.Add(t % 2, t, MlpInit({38, 8, 3}, t));
  const fs::path dir = fs::temp_directory_path() / "dreamcfr_archive_test";
  fs::remove_all(dir);
  archive.Save(dir.string(), GameId::kLeduc);
  CHECK(fs::exists(dir / "index.json"));
  CHECK(fs::exists(dir / "agent1_iter000001.drmnet"));
  GameId game;
  ModelArchive loaded = ModelArchive::Load(dir.string(), &game);
  CHECK(game == GameId::kLeduc);
  CHECK(loaded == archive);
  fs::remove_all(dir);
  CHECK_THROWS_AS(ModelArchive::Load(dir.string()), InvalidInputError);
}

}  // namespace
}  // namespace dreamcfr
