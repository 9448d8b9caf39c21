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

#ifndef DREAMCFR_MLP_H_
#define DREAMCFR_MLP_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dreamcfr/game.h"
#include "dreamcfr/random.h"

namespace dreamcfr {

inline constexpr int kDefaultHiddenWidth = 64;
inline constexpr int kDefaultHiddenLayers = 3;

// Input, hidden layers, output.
std::vector<int> DefaultDims(int input, int output,
                             int width = kDefaultHiddenWidth,
                             int layers = kDefaultHiddenLayers);

enum class OutputHead { kLinear, kSoftmax };

template <typename Scalar>
struct BasicMlpParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<int> dims;
  std::vector<Matrix> weights;  // layer k: dims[k+1] x dims[k]
  std::vector<Vector> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_size() const { return dims.front(); }
  int output_size() const { return dims.back(); }
  int64_t NumParameters() const;

  // Same shape, all zeros.
  BasicMlpParams ZerosLike() const;

  template <typename Other>
  BasicMlpParams<Other> Cast() const {
    BasicMlpParams<Other> out;
    out.dims = dims;
    for (const auto& w : weights) out.weights.push_back(w.template cast<Other>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<Other>());
    return out;
  }

  bool operator==(const BasicMlpParams& other) const;
};

using MlpParams = BasicMlpParams<float>;

// Scaled-uniform fan-in initialization; deterministic given the seed.
MlpParams MlpInit(const std::vector<int>& dims, uint64_t seed);

// Rows of `features` are samples. `mask` (same shape as the output, entries 0
// or 1) restricts the softmax head to legal actions; masked-out outputs are 0.
template <typename Scalar>
typename BasicMlpParams<Scalar>::Matrix Forward(
    const BasicMlpParams<Scalar>& params,
    const typename BasicMlpParams<Scalar>::Matrix& features,
    OutputHead head = OutputHead::kLinear,
    const typename BasicMlpParams<Scalar>::Matrix* mask = nullptr);

// Single-sample convenience wrapper.
std::vector<float> Forward(const MlpParams& params,
                           std::span<const float> features,
                           OutputHead head = OutputHead::kLinear,
                           std::span<const float> mask = {});

template <typename Scalar>
struct BasicTrainBatch {
  using Matrix = typename BasicMlpParams<Scalar>::Matrix;
  using Vector = typename BasicMlpParams<Scalar>::Vector;
  Matrix features;  // n x input
  Matrix targets;   // n x output
  Matrix mask;      // n x output, 1 for entries that carry loss
  Vector weights;   // n, positive

  void Resize(int rows, int input, int output) {
    features.setZero(rows, input);
    targets.setZero(rows, output);
    mask.setZero(rows, output);
    weights.setOnes(rows);
  }
};

using TrainBatch = BasicTrainBatch<float>;

// Loss = sum_r w_r sum_j m_rj (y_rj - t_rj)^2 / sum_r w_r, with exact
// gradients. Throws InvalidInputError on non-finite targets or non-positive
// weights.
template <typename Scalar>
Scalar LossAndGrads(const BasicMlpParams<Scalar>& params,
                    const BasicTrainBatch<Scalar>& batch, OutputHead head,
                    BasicMlpParams<Scalar>* grads);

// Scales `grads` to global L2 norm max_norm when it is larger. Returns the
// norm before clipping.
template <typename Scalar>
double ClipGradNorm(BasicMlpParams<Scalar>& grads, double max_norm);

template <typename Scalar>
double GradNorm(const BasicMlpParams<Scalar>& grads);

struct AdamState {
  MlpParams m;
  MlpParams v;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Reset(const MlpParams& like) {
    m = like.ZerosLike();
    v = like.ZerosLike();
    step = 0;
  }
  bool operator==(const AdamState&) const = default;
};

void AdamStep(MlpParams& params, AdamState& state, const MlpParams& grads,
              double lr);

struct TrainOptions {
  int batches = 0;
  int batch_size = 0;
  double lr = 1e-3;
  double clip = 1.0;
  OutputHead head = OutputHead::kLinear;
  bool reset = false;
  uint64_t init_seed = 0;  // used when reset is set
};

struct TrainResult {
  bool skipped = false;  // empty buffer: nothing was trained
  int batches = 0;
  double first_loss = 0.0;
  double last_loss = 0.0;
};

// Fills `batch` with the buffer items at `indices`.
using BatchBuilder =
    std::function<void(std::span<const int64_t> indices, TrainBatch& batch)>;

// Draws `batches` minibatches uniformly with replacement from a buffer of
// `buffer_size` items. Resets params and optimizer first when requested.
TrainResult Train(MlpParams& params, AdamState& adam, int64_t buffer_size,
                  const BatchBuilder& build, const TrainOptions& options,
                  Rng& rng);

// Binary container: "DRMNET1", uint32 game id, uint32 dimension count,
// uint32 dims, then per layer the weight matrix (row-major) and the bias as
// little-endian float32.
void SaveMlp(std::ostream& out, GameId game, const MlpParams& params);
MlpParams LoadMlp(std::istream& in, GameId* game = nullptr);
void SaveMlpFile(const std::string& path, GameId game, const MlpParams& params);
MlpParams LoadMlpFile(const std::string& path, GameId* game = nullptr);

}  // namespace dreamcfr

#endif  // DREAMCFR_MLP_H_
