// Copyright 2026 The AssertForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASSERTFORGE_MODEL_H_
#define ASSERTFORGE_MODEL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "assertforge/common.h"
#include "assertforge/random.h"
#include "assertforge/textprep.h"

namespace assertforge::model {

class NonFiniteGradientError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct ModelConfig {
  int enc_layers = 2;
  int dec_layers = 2;
  int d_model = 64;
  int n_heads = 4;
  int d_ff = 256;
  int max_len = 128;
  int vocab_size = kDefaultVocabSize;
  double dropout = 0.1;
  // One embedding matrix serves encoder input, decoder input and the output
  // projection. The untied layout exists for gradient comparisons.
  bool tie_embeddings = true;

  // Throws ConfigError.
  void Validate() const;
  std::map<std::string, std::string> ToMap() const;
  // Missing keys keep their defaults.
  static ModelConfig FromMap(const std::map<std::string, std::string>& kv);
  bool operator==(const ModelConfig&) const = default;
};

template <typename S>
struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<S> data;
};

// Named tensors implied by a ModelConfig, in a fixed order.
template <typename S>
class Parameters {
 public:
  Parameters() = default;
  // All tensors zero.
  explicit Parameters(const ModelConfig& cfg);
  // Weights ~ N(0, 0.02), biases zero, layer-norm gains one.
  static Parameters Init(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  std::vector<Tensor<S>>& tensors() { return tensors_; }
  const std::vector<Tensor<S>>& tensors() const { return tensors_; }
  int Index(const std::string& name) const;  // -1 when absent
  Tensor<S>& at(const std::string& name);
  const Tensor<S>& at(const std::string& name) const;
  std::size_t NumScalars() const;
  void SetZero();
  bool AllFinite() const;

  template <typename T>
  Parameters<T> Cast() const {
    Parameters<T> out(cfg_);
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      const auto& src = tensors_[i].data;
      auto& dst = out.tensors()[i].data;
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<T>(src[j]);
    }
    return out;
  }

 private:
  ModelConfig cfg_;
  std::vector<Tensor<S>> tensors_;
  std::map<std::string, int> index_;
};

// One training pair of raw token ids (no BOS/EOS).
struct Example {
  std::vector<int> source;
  std::vector<int> target;
};

// Model-side framing: encoder sees source + EOS, decoder sees BOS + target and
// predicts target + EOS. Both are truncated to fit max_len.
std::vector<int> EncoderInput(const std::vector<int>& source, int max_len);
std::vector<int> DecoderInput(const std::vector<int>& target, int max_len);
std::vector<int> DecoderLabels(const std::vector<int>& target, int max_len);

// Row-major dense matrix used for logits and log-probabilities.
template <typename S>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<S> data;
  S operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(c)];
  }
};

template <typename S>
class Transformer {
 public:
  explicit Transformer(const Parameters<S>& params);
  ~Transformer();
  Transformer(const Transformer&) = delete;
  Transformer& operator=(const Transformer&) = delete;

  const Parameters<S>& params() const { return params_; }

  // Logits (tgt_len x vocab) for one pair of already framed inputs. Dropout
  // is off. Throws ShapeError on out-of-range ids or lengths.
  Matrix<S> Logits(const std::vector<int>& enc_in,
                   const std::vector<int>& dec_in) const;

  // Sum of token cross-entropies of `labels` (PAD labels skipped). When
  // `grads` is set, adds scale * d(sum)/d(theta) into it. `dropout_rng`
  // enables dropout; null disables it.
  S LossAndGradient(const std::vector<int>& enc_in,
                    const std::vector<int>& dec_in,
                    const std::vector<int>& labels, Parameters<S>* grads,
                    S scale, Rng* dropout_rng) const;

  // Incremental decoding.
  struct Memory;
  struct DecodeState;
  std::shared_ptr<const Memory> Encode(const std::vector<int>& enc_in) const;
  std::shared_ptr<DecodeState> StartDecoding(
      std::shared_ptr<const Memory> memory) const;
  std::shared_ptr<DecodeState> Clone(const DecodeState& state) const;
  // Feeds `token` at the next position and returns log-probabilities of the
  // following token.
  std::vector<S> Step(DecodeState& state, int token) const;
  int Position(const DecodeState& state) const;

 private:
  struct Impl;
  const Parameters<S>& params_;
  std::unique_ptr<Impl> impl_;
};

// Padded batch forward: rows of `src` and `tgt` are padded with PAD; padding
// is stripped before encoding. Returns batch x tgt_len x vocab logits in a
// flat vector, zero at padded target positions.
template <typename S>
std::vector<S> ForwardBatch(const Parameters<S>& params,
                            const std::vector<std::vector<int>>& src,
                            const std::vector<std::vector<int>>& tgt);

// Mean token cross-entropy of logits (rows x vocab) against labels, PAD
// labels skipped. Throws ShapeError when no label contributes.
template <typename S>
S MeanCrossEntropy(const Matrix<S>& logits, const std::vector<int>& labels);

// Mean token loss over a set of examples (dropout off).
template <typename S>
double MeanLoss(const Parameters<S>& params, const std::vector<Example>& data);

// Gradient of the mean token loss over `batch`; returns the loss.
template <typename S>
S BatchGradient(const Parameters<S>& params, const std::vector<Example>& batch,
                Parameters<S>* grads);

// Same parameter values in the untied layout: the shared embedding is copied
// to the encoder, decoder and output matrices.
template <typename S>
Parameters<S> Untie(const Parameters<S>& tied);

}  // namespace assertforge::model

#endif  // ASSERTFORGE_MODEL_H_
