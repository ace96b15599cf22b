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

// File-level pipeline stages. Each stage reads and writes the artifacts the
// command line tool passes between subcommands; the tool only parses flags
// and writes the run manifest around these calls.

#ifndef ASSERTFORGE_PIPELINE_H_
#define ASSERTFORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "assertforge/evaluation.h"
#include "assertforge/generation.h"
#include "assertforge/mining.h"
#include "assertforge/noising.h"
#include "assertforge/textprep.h"
#include "assertforge/training.h"

namespace assertforge::pipeline {

namespace fs = std::filesystem;

// ---- mine -----------------------------------------------------------------

struct MineArgs {
  fs::path src_dir;
  fs::path focal_dir;
  fs::path out_dir;
  std::uint64_t seed = 0;
  bool without_focal = false;
  int jobs = 1;
};

// Writes train.jsonl, valid.jsonl, test.jsonl and mining_stats.txt.
mining::MiningStats Mine(const MineArgs& args);

// ---- build-vocab ----------------------------------------------------------

// Documents from a file or directory. Directories contribute one document
// per regular file (sorted by path). A .jsonl file contributes its "source"
// and "target" strings, or "text"; any other file one document per line.
std::vector<std::string> ReadDocuments(const fs::path& input);

struct VocabArgs {
  std::vector<fs::path> inputs;
  int vocab_size = kDefaultVocabSize;
  int min_pair_count = 2;
  fs::path out;
};

Vocabulary BuildVocab(const VocabArgs& args);

// ---- pretrain-prep --------------------------------------------------------

struct PrepArgs {
  std::vector<fs::path> inputs;
  fs::path vocab;
  noising::CorruptionConfig corruption;
  double max_non_ascii = 0.1;
  fs::path out;  // JSONL of {"source": [ids], "target": [ids]}
};

struct PrepStats {
  noising::CorpusFilterStats filter;
  std::size_t pairs = 0;
  std::size_t source_tokens = 0;
  std::size_t target_tokens = 0;
};

PrepStats PretrainPrep(const PrepArgs& args);

// ---- pretrain / finetune --------------------------------------------------

// Loads training examples. Lines whose "source" is an id array are taken as
// is; string sources and targets are encoded with `vocab`.
std::vector<model::Example> LoadExamples(const fs::path& path,
                                         const Vocabulary& vocab);

struct TrainArgs {
  fs::path train;
  fs::path valid;
  fs::path vocab;
  fs::path out_dir;
  std::optional<fs::path> init_checkpoint;
  model::ModelConfig model;
  training::OptimizerConfig optimizer;
  training::TrainConfig run;
  bool wide = false;        // float64 parameters and checkpoints
  std::string stage;        // "pretrain" or "finetune"
  std::string mode;         // pretrain: "english" or "code"
  std::string variant;      // finetune: expected lineage, may be empty
  bool resume = false;      // continue from out_dir/last when present
};

struct TrainSummary {
  std::string lineage;
  std::int64_t steps = 0;
  int epochs = 0;
  double best_valid = 0;
  int best_epoch = -1;
  bool early_stopped = false;
};

// Lineage after training `stage` in `mode` on top of `init_lineage`.
std::string NextLineage(const std::string& init_lineage,
                        const std::string& stage, const std::string& mode);

// Writes out_dir/best and out_dir/last checkpoints (each with vocab.txt) and
// out_dir/loss_curve.csv.
TrainSummary Train(const TrainArgs& args);

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  fs::path checkpoint;
  fs::path vocab;  // defaults to <checkpoint>/vocab.txt
  fs::path input;
  fs::path out;
  generation::GenerationConfig generation;
  int jobs = 1;
};

// Output lines: {"source": ..., "candidates": [...]}.
std::size_t Generate(const GenerateArgs& args);

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  fs::path candidates;
  fs::path targets;
  fs::path out;  // report.json; a text table goes next to it as .txt
  std::optional<fs::path> checkpoint;  // with `valid`, adds validation loss
  std::optional<fs::path> valid;
};

evaluation::EvalReport Evaluate(const EvaluateArgs& args);

// ---- augment --------------------------------------------------------------

struct AugmentArgs {
  fs::path tests_dir;
  fs::path candidates;  // {"file", "test", "focal", "candidates"[, "focal_file"]}
  fs::path out_dir;
  fs::path report;
  fs::path focal_dir;  // optional; focal classes for scope resolution
};

struct AugmentSummary {
  std::size_t tests = 0;
  std::size_t augmented = 0;
  std::size_t none = 0;
};

AugmentSummary Augment(const AugmentArgs& args);

}  // namespace assertforge::pipeline

#endif  // ASSERTFORGE_PIPELINE_H_
