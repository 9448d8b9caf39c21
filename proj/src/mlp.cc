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

#include "dreamcfr/mlp.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "dreamcfr/errors.h"

namespace dreamcfr {
namespace {

constexpr char kMagic[] = "DRMNET1";
constexpr size_t kMagicSize = 7;

template <typename Scalar>
using Mat = typename BasicMlpParams<Scalar>::Matrix;

template <typename Scalar>
void MaskedSoftmaxInPlace(Mat<Scalar>& z, const Mat<Scalar>* mask) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    Scalar top = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      if (mask == nullptr || (*mask)(r, j) != 0) top = std::max(top, z(r, j));
    }
    Scalar total = 0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      if (mask == nullptr || (*mask)(r, j) != 0) {
        z(r, j) = std::exp(z(r, j) - top);
        total += z(r, j);
      } else {
        z(r, j) = 0;
      }
    }
    if (total > 0) z.row(r) /= total;
  }
}

void PutU32(std::ostream& out, uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff),
                              static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

uint32_t GetU32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw InvalidInputError("truncated network file");
  return uint32_t{b[0]} | uint32_t{b[1]} << 8 | uint32_t{b[2]} << 16 |
         uint32_t{b[3]} << 24;
}

void PutF32(std::ostream& out, float f) { PutU32(out, std::bit_cast<uint32_t>(f)); }
float GetF32(std::istream& in) { return std::bit_cast<float>(GetU32(in)); }

}  // namespace

std::vector<int> DefaultDims(int input, int output, int width, int layers) {
  std::vector<int> dims{input};
  for (int k = 0; k < layers; ++k) dims.push_back(width);
  dims.push_back(output);
  return dims;
}

template <typename Scalar>
int64_t BasicMlpParams<Scalar>::NumParameters() const {
  int64_t n = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    n += weights[k].size() + biases[k].size();
  }
  return n;
}

template <typename Scalar>
BasicMlpParams<Scalar> BasicMlpParams<Scalar>::ZerosLike() const {
  BasicMlpParams out;
  out.dims = dims;
  for (const auto& w : weights) out.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) out.biases.push_back(Vector::Zero(b.size()));
  return out;
}

template <typename Scalar>
bool BasicMlpParams<Scalar>::operator==(const BasicMlpParams& other) const {
  if (dims != other.dims) return false;
  for (size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] != other.weights[k] || biases[k] != other.biases[k]) {
      return false;
    }
  }
  return true;
}

template struct BasicMlpParams<float>;
template struct BasicMlpParams<double>;

MlpParams MlpInit(const std::vector<int>& dims, uint64_t seed) {
  if (dims.size() < 2) throw InvalidInputError("network needs two layers");
  for (int d : dims) {
    if (d <= 0) throw InvalidInputError("zero-sized network layer");
  }
  Rng rng(seed);
  MlpParams p;
  p.dims = dims;
  for (size_t k = 0; k + 1 < dims.size(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[k]));
    MlpParams::Matrix w(dims[k + 1], dims[k]);
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        w(r, c) = static_cast<float>((2.0 * rng.Uniform() - 1.0) * bound);
      }
    }
    MlpParams::Vector b(dims[k + 1]);
    for (int r = 0; r < b.size(); ++r) {
      b(r) = static_cast<float>((2.0 * rng.Uniform() - 1.0) * bound);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

template <typename Scalar>
Mat<Scalar> Forward(const BasicMlpParams<Scalar>& params,
                    const Mat<Scalar>& features, OutputHead head,
                    const Mat<Scalar>* mask) {
  if (features.cols() != params.input_size()) {
    throw InvalidInputError("feature length does not match the network input");
  }
  Mat<Scalar> a = features;
  for (int k = 0; k < params.num_layers(); ++k) {
    Mat<Scalar> z = a * params.weights[k].transpose();
    z.rowwise() += params.biases[k].transpose();
    if (k + 1 < params.num_layers()) {
      a = z.cwiseMax(Scalar(0));
    } else {
      a = std::move(z);
    }
  }
  if (head == OutputHead::kSoftmax) MaskedSoftmaxInPlace<Scalar>(a, mask);
  return a;
}

template Mat<float> Forward(const BasicMlpParams<float>&, const Mat<float>&,
                            OutputHead, const Mat<float>*);
template Mat<double> Forward(const BasicMlpParams<double>&, const Mat<double>&,
                             OutputHead, const Mat<double>*);

std::vector<float> Forward(const MlpParams& params,
                           std::span<const float> features, OutputHead head,
                           std::span<const float> mask) {
  if (static_cast<int>(features.size()) != params.input_size()) {
    throw InvalidInputError("feature length does not match the network input");
  }
  MlpParams::Matrix x(1, features.size());
  for (size_t j = 0; j < features.size(); ++j) x(0, j) = features[j];
  MlpParams::Matrix m;
  if (!mask.empty()) {
    m.resize(1, mask.size());
    for (size_t j = 0; j < mask.size(); ++j) m(0, j) = mask[j];
  }
  const MlpParams::Matrix y = Forward<float>(params, x, head, mask.empty() ? nullptr : &m);
  return std::vector<float>(y.data(), y.data() + y.size());
}

template <typename Scalar>
Scalar LossAndGrads(const BasicMlpParams<Scalar>& params,
                    const BasicTrainBatch<Scalar>& batch, OutputHead head,
                    BasicMlpParams<Scalar>* grads) {
  const Eigen::Index n = batch.features.rows();
  if (batch.targets.rows() != n || batch.mask.rows() != n ||
      batch.weights.size() != n || batch.targets.cols() != params.output_size() ||
      batch.mask.cols() != params.output_size()) {
    throw InvalidInputError("batch shapes do not match the network");
  }
  if (batch.features.cols() != params.input_size()) {
    throw InvalidInputError("feature length does not match the network input");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!(batch.weights(r) > 0) || !std::isfinite(batch.weights(r))) {
      throw InvalidInputError("sample weights must be positive and finite");
    }
    for (Eigen::Index j = 0; j < batch.targets.cols(); ++j) {
      if (batch.mask(r, j) != 0 && !std::isfinite(batch.targets(r, j))) {
        throw InvalidInputError("non-finite training target");
      }
    }
  }

  std::vector<Mat<Scalar>> acts{batch.features};
  Mat<Scalar> out;
  for (int k = 0; k < params.num_layers(); ++k) {
    Mat<Scalar> z = acts.back() * params.weights[k].transpose();
    z.rowwise() += params.biases[k].transpose();
    if (k + 1 < params.num_layers()) {
      acts.push_back(z.cwiseMax(Scalar(0)));
    } else {
      out = std::move(z);
    }
  }
  if (head == OutputHead::kSoftmax) MaskedSoftmaxInPlace<Scalar>(out, &batch.mask);

  const Scalar total_weight = batch.weights.sum();
  const Mat<Scalar> diff = (out - batch.targets).cwiseProduct(batch.mask);
  const Scalar loss =
      (diff.array().square().rowwise().sum().matrix().cwiseProduct(batch.weights))
          .sum() /
      total_weight;
  if (grads == nullptr) return loss;

  Mat<Scalar> g = (Scalar(2) / total_weight) *
                  (batch.weights.asDiagonal() * diff);
  if (head == OutputHead::kSoftmax) {
    const auto inner = out.cwiseProduct(g).rowwise().sum();
    g = out.cwiseProduct(g.colwise() - inner).cwiseProduct(batch.mask);
  }
  *grads = params.ZerosLike();
  for (int k = params.num_layers() - 1; k >= 0; --k) {
    grads->weights[k] = g.transpose() * acts[k];
    grads->biases[k] = g.colwise().sum().transpose();
    if (k > 0) {
      Mat<Scalar> prev = g * params.weights[k];
      g = prev.cwiseProduct(
          (acts[k].array() > Scalar(0)).matrix().template cast<Scalar>());
    }
  }
  return loss;
}

template float LossAndGrads(const BasicMlpParams<float>&,
                            const BasicTrainBatch<float>&, OutputHead,
                            BasicMlpParams<float>*);
template double LossAndGrads(const BasicMlpParams<double>&,
                             const BasicTrainBatch<double>&, OutputHead,
                             BasicMlpParams<double>*);

template <typename Scalar>
double GradNorm(const BasicMlpParams<Scalar>& grads) {
  double sq = 0.0;
  for (size_t k = 0; k < grads.weights.size(); ++k) {
    sq += grads.weights[k].template cast<double>().squaredNorm();
    sq += grads.biases[k].template cast<double>().squaredNorm();
  }
  return std::sqrt(sq);
}

template <typename Scalar>
double ClipGradNorm(BasicMlpParams<Scalar>& grads, double max_norm) {
  const double norm = GradNorm(grads);
  if (norm > max_norm) {
    const Scalar scale = static_cast<Scalar>(max_norm / norm);
    for (auto& w : grads.weights) w *= scale;
    for (auto& b : grads.biases) b *= scale;
  }
  return norm;
}

template double GradNorm(const BasicMlpParams<float>&);
template double GradNorm(const BasicMlpParams<double>&);
template double ClipGradNorm(BasicMlpParams<float>&, double);
template double ClipGradNorm(BasicMlpParams<double>&, double);

void AdamStep(MlpParams& params, AdamState& state, const MlpParams& grads,
              double lr) {
  if (state.m.dims != params.dims) state.Reset(params);
  if (grads.dims != params.dims) {
    throw InvalidInputError("gradient shape does not match the network");
  }
  ++state.step;
  const float b1 = static_cast<float>(state.beta1);
  const float b2 = static_cast<float>(state.beta2);
  const float c1 = static_cast<float>(1.0 - std::pow(state.beta1, state.step));
  const float c2 = static_cast<float>(1.0 - std::pow(state.beta2, state.step));
  const float step = static_cast<float>(lr);
  const float eps = static_cast<float>(state.epsilon);
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0f - b1) * g;
    v = b2 * v + (1.0f - b2) * g.cwiseProduct(g);
    p.array() -= step * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + eps);
  };
  for (int k = 0; k < params.num_layers(); ++k) {
    update(params.weights[k], state.m.weights[k], state.v.weights[k],
           grads.weights[k]);
    update(params.biases[k], state.m.biases[k], state.v.biases[k],
           grads.biases[k]);
  }
}

TrainResult Train(MlpParams& params, AdamState& adam, int64_t buffer_size,
                  const BatchBuilder& build, const TrainOptions& options,
                  Rng& rng) {
  TrainResult result;
  if (buffer_size <= 0) {
    result.skipped = true;
    return result;
  }
  if (options.reset) {
    params = MlpInit(params.dims, options.init_seed);
    adam.Reset(params);
  }
  if (adam.m.dims != params.dims) adam.Reset(params);
  TrainBatch batch;
  std::vector<int64_t> indices(options.batch_size);
  MlpParams grads;
  for (int b = 0; b < options.batches; ++b) {
    for (int64_t& i : indices) i = rng.UniformInt(buffer_size);
    batch.Resize(options.batch_size, params.input_size(), params.output_size());
    build(indices, batch);
    const double loss = LossAndGrads<float>(params, batch, options.head, &grads);
    if (!std::isfinite(loss)) throw DivergenceError("training loss is not finite");
    ClipGradNorm(grads, options.clip);
    AdamStep(params, adam, grads, options.lr);
    if (b == 0) result.first_loss = loss;
    result.last_loss = loss;
    ++result.batches;
  }
  return result;
}

void SaveMlp(std::ostream& out, GameId game, const MlpParams& params) {
  out.write(kMagic, kMagicSize);
  PutU32(out, static_cast<uint32_t>(game));
  PutU32(out, static_cast<uint32_t>(params.dims.size()));
  for (int d : params.dims) PutU32(out, static_cast<uint32_t>(d));
  for (int k = 0; k < params.num_layers(); ++k) {
    const auto& w = params.weights[k];
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) PutF32(out, w(r, c));
    }
    for (int r = 0; r < params.biases[k].size(); ++r) {
      PutF32(out, params.biases[k](r));
    }
  }
  if (!out) throw Error("failed to write network");
}

MlpParams LoadMlp(std::istream& in, GameId* game) {
  char magic[kMagicSize];
  in.read(magic, kMagicSize);
  if (!in || std::memcmp(magic, kMagic, kMagicSize) != 0) {
    throw InvalidInputError("not a DRMNET1 network file");
  }
  const uint32_t id = GetU32(in);
  if (id > static_cast<uint32_t>(GameId::kFhp)) {
    throw InvalidInputError("unknown game id in network file");
  }
  if (game != nullptr) *game = static_cast<GameId>(id);
  const uint32_t num_dims = GetU32(in);
  if (num_dims < 2 || num_dims > 64) {
    throw InvalidInputError("bad layer count in network file");
  }
  MlpParams p;
  for (uint32_t k = 0; k < num_dims; ++k) {
    const uint32_t d = GetU32(in);
    if (d == 0 || d > (1u << 20)) throw InvalidInputError("bad layer size");
    p.dims.push_back(static_cast<int>(d));
  }
  for (size_t k = 0; k + 1 < p.dims.size(); ++k) {
    MlpParams::Matrix w(p.dims[k + 1], p.dims[k]);
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) w(r, c) = GetF32(in);
    }
    MlpParams::Vector b(p.dims[k + 1]);
    for (int r = 0; r < b.size(); ++r) b(r) = GetF32(in);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

void SaveMlpFile(const std::string& path, GameId game, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  SaveMlp(out, game, params);
}

MlpParams LoadMlpFile(const std::string& path, GameId* game) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return LoadMlp(in, game);
}

}  // namespace dreamcfr
