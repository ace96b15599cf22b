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

#ifndef ASSERTFORGE_TRAINING_H_
#define ASSERTFORGE_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "assertforge/model.h"

namespace assertforge::training {

using model::Example;
using model::ModelConfig;
using model::Parameters;

class NonFiniteUpdateError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-6;
  double base_lr = 1e-4;
  int warmup_steps = 100;
  int accum_freq = 4;
  int patience = 5;

  void Validate() const;
  std::map<std::string, std::string> ToMap() const;
  static OptimizerConfig FromMap(const std::map<std::string, std::string>& kv);
};

// Linear warmup to base_lr, then base_lr * sqrt(warmup / step).
double LrAt(std::int64_t step, const OptimizerConfig& cfg);

template <typename S>
struct OptimizerState {
  std::int64_t step = 0;
  Parameters<S> m;
  Parameters<S> v;

  OptimizerState() = default;
  explicit OptimizerState(const ModelConfig& cfg) : m(cfg), v(cfg) {}
};

// Bias-corrected Adam at LrAt(state.step + 1). Throws NonFiniteUpdateError
// and leaves everything untouched when a gradient or update is not finite.
template <typename S>
void AdamStep(Parameters<S>& params, const Parameters<S>& grads,
              OptimizerState<S>& state, const OptimizerConfig& cfg);

struct TrainConfig {
  int micro_batch = 8;
  int max_epochs = 20;
  std::int64_t max_steps = 0;  // 0: no limit
  std::uint64_t seed = 0;
};

// Shuffled, length-bucketed step groups for one epoch: examples are shuffled
// by (seed, epoch), stably sorted by length, cut into micro-batches, grouped
// accum_freq at a time, and the groups shuffled again.
std::vector<std::vector<std::vector<std::size_t>>> StepGroups(
    const std::vector<Example>& data, int max_len, int micro_batch,
    int accum_freq, std::uint64_t seed, int epoch);

struct LossPoint {
  std::int64_t step;
  std::string split;  // "train" or "valid"
  double loss;
};

void WriteLossCurve(const std::filesystem::path& path,
                    const std::vector<LossPoint>& curve);

// Position in the training schedule; enough to resume exactly.
struct Progress {
  int epoch = 0;
  std::size_t cursor = 0;  // next step group within the epoch
  double best_valid = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int epochs_since_best = 0;
  bool finished = false;
  bool early_stopped = false;
};

template <typename S>
class Trainer {
 public:
  Trainer(Parameters<S> init, OptimizerConfig opt, TrainConfig run);

  // Resume from saved state. `best` restores the best-validation parameters;
  // without it they start as the current parameters.
  void Restore(OptimizerState<S> state, Progress progress,
               std::optional<Parameters<S>> best = std::nullopt);

  // One optimizer step over `group` (accum_freq micro-batches, or fewer).
  // Returns the mean token loss of the group.
  double Step(const std::vector<Example>& data,
              const std::vector<std::vector<std::size_t>>& group);

  // Runs until max_epochs, max_steps, or early stopping. Validation loss is
  // computed after every epoch; `on_epoch` runs after each validation.
  void Run(const std::vector<Example>& train, const std::vector<Example>& valid,
           const std::function<void(const Trainer&)>& on_epoch = {});

  // Runs exactly `steps` further optimizer steps (crossing epochs without
  // validation). Used for resume checks.
  void RunSteps(const std::vector<Example>& train, std::int64_t steps);

  const Parameters<S>& params() const { return params_; }
  const Parameters<S>& best_params() const { return best_; }
  const OptimizerState<S>& state() const { return state_; }
  const Progress& progress() const { return progress_; }
  const std::vector<LossPoint>& curve() const { return curve_; }
  const OptimizerConfig& optimizer_config() const { return opt_; }
  const TrainConfig& train_config() const { return run_; }

 private:
  Parameters<S> params_;
  Parameters<S> best_;
  Parameters<S> grads_;
  OptimizerState<S> state_;
  OptimizerConfig opt_;
  TrainConfig run_;
  Progress progress_;
  std::vector<LossPoint> curve_;
};

// Checkpoint directory: manifest.txt (key=value), index.txt (name, dtype,
// shape), tensors/<name>.bin and optionally optimizer/{m,v}/<name>.bin, all
// little-endian row-major.
struct CheckpointMeta {
  ModelConfig model;
  OptimizerConfig optimizer;
  std::string vocab_digest;
  std::string lineage = "scratch";  // scratch, english, code, english+code
  std::string stage = "init";       // init, pretrain, finetune
  std::string dtype = "float32";    // blob precision: float32 or float64
  std::int64_t step = 0;
  Progress progress;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> extra;
};

template <typename S>
struct Checkpoint {
  CheckpointMeta meta;
  Parameters<S> params;
  std::optional<OptimizerState<S>> state;
};

template <typename S>
void SaveCheckpoint(const std::filesystem::path& dir, const CheckpointMeta& meta,
                    const Parameters<S>& params,
                    const OptimizerState<S>* state = nullptr);

template <typename S>
Checkpoint<S> LoadCheckpoint(const std::filesystem::path& dir);

CheckpointMeta LoadCheckpointMeta(const std::filesystem::path& dir);

// Reads and writes flat key=value text, '#' comments allowed.
std::map<std::string, std::string> ParseKeyValues(std::string_view text);
std::string FormatKeyValues(const std::map<std::string, std::string>& kv);

}  // namespace assertforge::training

#endif  // ASSERTFORGE_TRAINING_H_
