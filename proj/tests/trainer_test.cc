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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <vector>

#include "doctest.h"
#include "dreamcfr/errors.h"
#include "dreamcfr/evaluation.h"
#include "dreamcfr/trainer.h"
#include "test_util.h"

namespace dreamcfr {
namespace {

using testing::EnumeratingSampler;
using V = std::vector<double>;

TrainerConfig SmallKuhnConfig() {
  TrainerConfig c;
  c.game = GameId::kKuhn;
  c.traversals = 40;
  c.adv_batches_scratch = 30;
  c.adv_batches_finetune = 10;
  c.adv_batch_size = 64;
  c.q_batches = 20;
  c.q_batch_size = 64;
  c.adv_capacity = 4000;
  c.q_capacity = 1000;
  c.avg_capacity = 4000;
  c.avg_batches = 50;
  c.avg_batch_size = 64;
  c.hidden_width = 16;
  c.hidden_layers = 2;
  c.iterations = 20;
  c.seed = 11;
  return c;
}

FunctionPolicy Skewed() {
  return FunctionPolicy([](const InfostateKey& key, std::span<const ActionType> legal) {
    V p(legal.size(), 0.0);
    p[0] = 0.2 + 0.15 * key.holes[2 * key.agent] + 0.05 * key.actions.size();
    for (size_t k = 1; k < p.size(); ++k) p[k] = (1 - p[0]) / (p.size() - 1);
    return p;
  });
}

TEST_CASE("policy from advantages") {
  V a = PolicyFromAdvantages(V{2, 1, 1});
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(a[1] == doctest::Approx(0.25));
  CHECK(a[2] == doctest::Approx(0.25));
  CHECK(PolicyFromAdvantages(V{-1, -2}) == V{1, 0});
  CHECK(PolicyFromAdvantages(V{0, 0}) == V{1, 0});
  CHECK_THROWS_AS(PolicyFromAdvantages(V{0, std::nan("")}), DivergenceError);
}

TEST_CASE("q target") {
  QTransition tr;
  tr.terminal = true;
  tr.reward = 50;
  const float pi[3] = {0.5f, 0.5f, 0};
  const float q[3] = {2, 4, 9};
  CHECK(QTarget(tr, pi, q) == 50);
  tr.terminal = false;
  tr.reward = 0;
  tr.next_mask = {1, 1, 0};
  CHECK(QTarget(tr, pi, q) == doctest::Approx(3));
  const float greedy[3] = {1, 0, 0};
  CHECK(QTarget(tr, greedy, q) == doctest::Approx(2));
  // Masked-out slots never contribute.
  const float leak[3] = {0.5f, 0.5f, 1};
  CHECK(QTarget(tr, leak, q) == doctest::Approx(3));
}

TEST_CASE("config validation and names") {
  TrainerConfig c;
  c.epsilon = 1.5;
  try {
    c.Validate();
    FAIL("expected a validation error");
  } catch (const ConfigValidationError& e) {
    CHECK(e.key() == "epsilon");
  }
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.Validate(), ConfigValidationError);
  c.algorithm = Algorithm::kEsSdCfr;
  CHECK_NOTHROW(c.Validate());
  c.traversals = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigValidationError);
  CHECK(ParseAlgorithm("dream") == Algorithm::kDream);
  CHECK(ParseAlgorithm("OS-SD-CFR") == Algorithm::kOsSdCfr);
  CHECK(ParseResetMode("every10") == ResetMode::kEvery10);
  CHECK_THROWS_AS(ParseAlgorithm("nfsp"), InvalidInputError);
  const TrainerConfig k = SmallKuhnConfig();
  CHECK(TrainerConfigFromJson(TrainerConfigToJson(k)) == k);
}

TEST_CASE("importance weights equal the product of inverse sampling probabilities") {
  Rng rng(5);
  RngSampler sampler(rng);
  const FunctionPolicy policy = Skewed();
  for (int n = 0; n < 300; ++n) {
    const int traverser = n % 2;
    const TrajectoryRecord rec = OsTraverse(GameState::Initial(GameId::kLeduc), traverser,
                                            policy, 0.3, ZeroBaseline(), sampler);
    ReservoirBuffer<AdvantageSample> adv(100);
    CollectSinks sinks;
    sinks.advantages = &adv;
    CollectResult result;
    RecordTrajectory(rec, 1, 100.0, sinks, rng, result);
    double w = 1.0;
    int k = 0;
    for (const TrajectoryStep& s : rec.steps) {
      if (s.actor != traverser) continue;
      REQUIRE(k < adv.size());
      CHECK(adv[k].weight == static_cast<float>(w));
      w *= 1.0 / s.sampling[s.action];
      ++k;
    }
    CHECK(k == adv.size());
  }
}

TEST_CASE("transitions chain consecutive decision points") {
  Rng rng(9);
  RngSampler sampler(rng);
  UniformPolicy uniform;
  for (int n = 0; n < 50; ++n) {
    const TrajectoryRecord rec = OsTraverse(GameState::Initial(GameId::kLeduc), n % 2,
                                            uniform, 0.5, ZeroBaseline(), sampler);
    CircularBuffer<QTransition> q(100);
    CollectSinks sinks;
    sinks.transitions = &q;
    CollectResult result;
    RecordTrajectory(rec, 1, 100.0, sinks, rng, result);
    REQUIRE(q.size() == static_cast<int64_t>(rec.steps.size()));
    for (int64_t k = 0; k < q.size(); ++k) {
      const TrajectoryStep& s = rec.steps[k];
      CHECK(q[k].joint_features == EncodeJointInfostate(s.state));
      CHECK(q[k].action == ActionSlot(s.legal[s.action]));
      const bool last = k + 1 == q.size();
      CHECK(q[k].terminal == last);
      if (last) {
        CHECK(q[k].reward == static_cast<float>(rec.terminal_reward / 100.0));
      } else {
        CHECK(q[k].reward == 0.0f);
        CHECK(q[k].next_actor == rec.steps[k + 1].actor);
        CHECK(q[k].next_features == EncodeInfostate(rec.steps[k + 1].key));
      }
    }
  }
}

TEST_CASE("zero q network reproduces outcome-sampling samples") {
  MlpParams zero =
      MlpInit(DefaultDims(JointEncodingSize(GameId::kLeduc), kNetOutputs, 16, 2), 1)
          .ZerosLike();
  const QNetBaseline q0(zero, 100.0);
  const FunctionPolicy policy = Skewed();
  ReservoirBuffer<AdvantageSample> a(200), b(200);
  CollectSinks sa, sb;
  sa.advantages = &a;
  sb.advantages = &b;
  Rng ra(77), rb(77);
  const CollectResult x =
      DreamCollect(GameId::kLeduc, 3, 1, policy, q0, 0.5, 500, 100.0, sa, ra);
  const CollectResult y =
      DreamCollect(GameId::kLeduc, 3, 1, policy, ZeroBaseline(), 0.5, 500, 100.0, sb, rb);
  CHECK(x.nodes_touched == y.nodes_touched);
  CHECK(a.seen() == b.seen());
  CHECK(a.items() == b.items());
  CHECK(ra == rb);
}

TEST_CASE("stored advantages are unbiased for instantaneous regret on kuhn") {
  const GameTree tree = GameTree::Build(GameId::kKuhn);
  const FunctionPolicy policy = Skewed();
  const MlpParams qnet =
      MlpInit(DefaultDims(JointEncodingSize(GameId::kKuhn), kNetOutputs, 8, 1), 3);
  const QNetBaseline learned(qnet, 100.0);
  const ZeroBaseline zero;
  for (const BaselineSource* baseline : {static_cast<const BaselineSource*>(&zero),
                                         static_cast<const BaselineSource*>(&learned)}) {
    for (int traverser = 0; traverser < 2; ++traverser) {
      std::map<std::vector<float>, V> expect;
      Rng rng(0);
      EnumeratingSampler::ForEachPath([&](EnumeratingSampler& s) {
        const TrajectoryRecord rec = OsTraverse(GameState::Initial(GameId::kKuhn), traverser,
                                                policy, 0.5, *baseline, s);
        ReservoirBuffer<AdvantageSample> buf(64);
        CollectSinks sinks;
        sinks.advantages = &buf;
        CollectResult result;
        RecordTrajectory(rec, 1, 100.0, sinks, rng, result);
        for (const AdvantageSample& smp : buf.items()) {
          V& acc = expect[smp.features];
          acc.resize(kNetOutputs, 0.0);
          for (int k = 0; k < kNetOutputs; ++k) {
            acc[k] += s.probability() * smp.weight * smp.targets[k] * 100.0;
          }
        }
      });
      const testing::CounterfactualValues cf =
          testing::ComputeCounterfactualValues(tree, policy, traverser);
      int checked = 0;
      for (const auto& [key, q] : cf.action_values) {
        const std::vector<ActionType> legal = LegalActionsAt(key);
        const V pi = policy.ActionProbabilities(key, legal);
        double v = 0.0;
        for (size_t k = 0; k < legal.size(); ++k) v += pi[k] * q[k];
        const V& got = expect.at(EncodeInfostate(key));
        for (size_t k = 0; k < legal.size(); ++k) {
          const double regret = cf.external_reach.at(key) * (q[k] - v);
          CHECK(got[ActionSlot(legal[k])] == doctest::Approx(regret).epsilon(1e-5));
          ++checked;
        }
      }
      CHECK(checked == 12);
    }
  }
}

TEST_CASE("exact q baseline gives zero-variance advantages on a fixed deal") {
  // Leduc with all cards fixed: infostates and histories coincide.
  const int h0[] = {0};
  const int h1[] = {3};
  const int board[] = {4};
  const GameState root = GameState::FixedDeal(GameId::kLeduc, h0, h1, board);
  const FunctionPolicy policy = Skewed();
  const OracleBaseline oracle(policy);
  for (int traverser = 0; traverser < 2; ++traverser) {
    std::map<std::pair<std::vector<float>, int>, std::pair<float, float>> range;
    Rng rng(2);
    RngSampler sampler(rng);
    for (int n = 0; n < 400; ++n) {
      const TrajectoryRecord rec = OsTraverse(root, traverser, policy, 0.5, oracle, sampler);
      ReservoirBuffer<AdvantageSample> buf(64);
      CollectSinks sinks;
      sinks.advantages = &buf;
      CollectResult result;
      RecordTrajectory(rec, 1, 100.0, sinks, rng, result);
      for (const AdvantageSample& s : buf.items()) {
        for (int k = 0; k < kNetOutputs; ++k) {
          auto [it, fresh] = range.try_emplace({s.features, k}, s.targets[k], s.targets[k]);
          it->second.first = std::min(it->second.first, s.targets[k]);
          it->second.second = std::max(it->second.second, s.targets[k]);
        }
      }
    }
    CHECK(range.size() > 10);
    for (const auto& [key, mm] : range) CHECK(mm.second - mm.first < 1e-5);
  }
}

TEST_CASE("trainer alternates traversers and grows the archive") {
  Trainer trainer(SmallKuhnConfig());
  CHECK_FALSE(trainer.has_advantage_net(1));
  IterationReport r = trainer.RunIteration();
  CHECK(r.iteration == 1);
  CHECK(r.traverser == 1);
  CHECK(r.nodes_touched > 0);
  CHECK(trainer.archive().size(1) == 1);
  CHECK(trainer.archive().size(0) == 0);
  for (int t = 2; t <= 6; ++t) {
    r = trainer.RunIteration();
    CHECK(r.traverser == t % 2);
    CHECK(r.d_reset);
  }
  CHECK(trainer.archive().size(0) == 3);
  CHECK(trainer.archive().size(1) == 3);
  CHECK(trainer.archive().entries(0).back().iteration == 6);
  CHECK(trainer.q_buffer(0).size() > 0);
  CHECK(trainer.total_nodes_touched() > 0);
}

TEST_CASE("reset schedule") {
  TrainerConfig c = SmallKuhnConfig();
  c.traversals = 5;
  c.adv_batches_scratch = 2;
  c.adv_batches_finetune = 1;
  c.q_batches = 1;
  c.reset = ResetMode::kEvery10;
  Trainer every(c);
  for (int t = 1; t <= 12; ++t) {
    const IterationReport r = every.RunIteration();
    CHECK(r.d_reset == (t <= 2 || t % 10 == 0 || t % 10 == 1));
  }
  c.reset = ResetMode::kNever;
  Trainer never(c);
  // The first network of each agent is always trained from scratch.
  CHECK(never.RunIteration().d_reset);
  CHECK(never.RunIteration().d_reset);
  for (int t = 3; t <= 5; ++t) CHECK_FALSE(never.RunIteration().d_reset);
}

TEST_CASE("es and os ablations train") {
  for (Algorithm a : {Algorithm::kEsSdCfr, Algorithm::kOsSdCfr}) {
    TrainerConfig c = SmallKuhnConfig();
    c.algorithm = a;
    Trainer trainer(c);
    for (int t = 1; t <= 4; ++t) {
      const IterationReport r = trainer.RunIteration();
      CHECK(r.nodes_touched > 0);
      CHECK(r.q_buffer_size == 0);
    }
    CHECK(trainer.archive().size(0) == 2);
  }
}

TEST_CASE("identical configs give identical trainers and checkpoints resume exactly") {
  TrainerConfig c = SmallKuhnConfig();
  c.avg_net = true;
  Trainer a(c), b(c);
  for (int t = 0; t < 4; ++t) {
    a.RunIteration();
    b.RunIteration();
  }
  CHECK(a == b);

  const std::string dir = (std::filesystem::temp_directory_path() / "dreamcfr_ckpt_test").string();
  std::filesystem::remove_all(dir);
  Trainer c1(c);
  c1.RunIteration();
  c1.RunIteration();
  c1.SaveCheckpoint(dir);
  Trainer resumed = Trainer::LoadCheckpoint(dir);
  CHECK(resumed == c1);
  resumed.RunIteration();
  resumed.RunIteration();
  CHECK(resumed == a);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(Trainer::LoadCheckpoint(dir), InvalidInputError);
}

MlpParams ConstantNet(GameId game, std::array<float, 3> out) {
  MlpParams p = MlpInit(DefaultDims(EncodingSize(game), kNetOutputs, 4, 1), 0).ZerosLike();
  for (int k = 0; k < 3; ++k) p.biases.back()(k) = out[k];
  return p;
}

TEST_CASE("average policy at a key") {
  const InfostateKey root = InfostateKeyOf(
      GameState::FixedDeal(GameId::kKuhn, std::array{0}, std::array{1}), 0);
  ModelArchive one;
  one.Add(0, 1, ConstantNet(GameId::kKuhn, {0, 2, 1}));
  const V p1 = AveragePolicyAt(one, 0, root, ArchiveWeighting::kLinear);
  CHECK(p1[0] == doctest::Approx(2.0 / 3));
  CHECK(p1[1] == doctest::Approx(1.0 / 3));

  ModelArchive two;
  two.Add(0, 1, ConstantNet(GameId::kKuhn, {0, 1, 0}));
  two.Add(0, 2, ConstantNet(GameId::kKuhn, {0, 0, 1}));
  const V u = AveragePolicyAt(two, 0, root, ArchiveWeighting::kUniform);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.5));
  const V l = AveragePolicyAt(two, 0, root, ArchiveWeighting::kLinear);
  CHECK(l[0] == doctest::Approx(1.0 / 3));

  // After check-bet, player 0's reach is 1 under the first model, 0 under the second.
  GameState s = GameState::FixedDeal(GameId::kKuhn, std::array{0}, std::array{1});
  s = Apply(Apply(s, ActionType::kCall), ActionType::kRaise);
  const V deep = AveragePolicyAt(two, 0, InfostateKeyOf(s, 0), ArchiveWeighting::kLinear);
  CHECK(deep[0] == doctest::Approx(0.0));
  CHECK(deep[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(AveragePolicyAt(two, 1, root, ArchiveWeighting::kLinear), InvalidInputError);
}

TEST_CASE("batched archive average matches the per-key computation") {
  TrainerConfig c = SmallKuhnConfig();
  Trainer trainer(c);
  for (int t = 0; t < 6; ++t) trainer.RunIteration();
  for (GameId g : {GameId::kKuhn}) {
    const GameTree tree = GameTree::Build(g);
    for (ArchiveWeighting w : {ArchiveWeighting::kUniform, ArchiveWeighting::kLinear}) {
      const TabularPolicy avg = ArchiveAveragePolicy(tree, trainer.archive(), w);
      const ArchivePolicy lazy(trainer.archive(), w);
      for (const TreeInfoset& info : tree.infosets()) {
        const V a = avg.ActionProbabilities(info.key, info.legal);
        const V b = lazy.ActionProbabilities(info.key, info.legal);
        for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("average network fits a single record") {
  ReservoirBuffer<PolicySample> buf(10);
  Rng rng(1);
  PolicySample s;
  const InfostateKey key =
      InfostateKeyOf(GameState::FixedDeal(GameId::kKuhn, std::array{1}, std::array{0}), 0);
  s.features = EncodeInfostate(key);
  s.targets = {0.0f, 0.3f, 0.7f};
  s.mask = {0, 1, 1};
  s.iteration = 1;
  buf.Add(s, rng);
  MlpParams net = MlpInit(DefaultDims(EncodingSize(GameId::kKuhn), kNetOutputs, 16, 2), 4);
  AdamState adam;
  adam.Reset(net);
  TrainOptions opts;
  opts.batch_size = 8;
  opts.head = OutputHead::kSoftmax;
  const MlpParams before = net;
  TrainSampleNet(net, adam, buf, Weighting::kLinear, opts, rng);
  CHECK(net == before);
  opts.batches = 2000;
  opts.lr = 3e-3;
  TrainSampleNet(net, adam, buf, Weighting::kLinear, opts, rng);
  const V p = AverageNetPolicy({&net, &net})
                  .ActionProbabilities(key, std::array{ActionType::kCall, ActionType::kRaise});
  CHECK(std::abs(p[0] - 0.3) < 0.02);
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
}

TEST_CASE("average network collection") {
  TrainerConfig c = SmallKuhnConfig();
  c.avg_net = true;
  Trainer trainer(c);
  CHECK_THROWS_AS(trainer.TrainAverageNet(0), InvalidInputError);
  trainer.RunIteration();
  CHECK(trainer.policy_buffer(0).size() > 0);
  CHECK(trainer.policy_buffer(1).size() == 0);
  const TrainResult r = trainer.TrainAverageNet(0);
  CHECK(r.batches == c.avg_batches);
  const AverageNetPolicy avg({&trainer.average_net(0), &trainer.average_net(1)});
  const GameTree tree = GameTree::Build(GameId::kKuhn);
  for (const TreeInfoset& info : tree.infosets()) {
    const V p = avg.ActionProbabilities(info.key, info.legal);
    double total = 0;
    for (double x : p) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

// Slow (about 90 s); set DREAMCFR_SLOW_TESTS=1 to run.
TEST_CASE("kuhn average exploitability falls fivefold from iteration 50 to 500") {
  if (std::getenv("DREAMCFR_SLOW_TESTS") == nullptr) return;
  TrainerConfig c;
  c.game = GameId::kKuhn;
  c.traversals = 300;
  c.adv_batches_scratch = 400;
  c.adv_batches_finetune = 10;
  c.adv_batch_size = 128;
  c.q_batches = 100;
  c.q_batch_size = 128;
  c.adv_capacity = 100000;
  c.q_capacity = 10000;
  c.hidden_width = 32;
  c.hidden_layers = 2;
  Trainer trainer(c);
  const GameTree tree = GameTree::Build(GameId::kKuhn);
  auto mbb = [&] {
    return Exploitability(tree, ArchiveAveragePolicy(tree, trainer.archive(),
                                                     trainer.archive_weighting()))
        .mbb;
  };
  double at50 = 0.0;
  for (int t = 1; t <= 500; ++t) {
    trainer.RunIteration();
    if (t == 50) at50 = mbb();
  }
  const double at500 = mbb();
  INFO("iteration 50: ", at50, " mbb/g, iteration 500: ", at500, " mbb/g");
  CHECK(at500 * 5.0 <= at50);
}

}  // namespace
}  // namespace dreamcfr
