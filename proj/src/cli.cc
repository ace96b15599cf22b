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

#include "assertforge/cli.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "assertforge/pipeline.h"

namespace assertforge::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Content digest of a file, or of every file under a directory.
std::string PathDigest(const fs::path& p) {
  if (fs::is_regular_file(p)) return DigestHex(ReadFile(p));
  if (!fs::is_directory(p)) return "missing";
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    all += fs::relative(f, p).generic_string() + '\0' + DigestHex(ReadFile(f)) + '\n';
  }
  return DigestHex(all);
}

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct Flags {
  Common common;
  pipeline::MineArgs mine;
  std::string mine_src, mine_focal, mine_out;

  std::vector<std::string> vocab_inputs;
  std::string vocab_out;
  int vocab_size = kDefaultVocabSize;
  int min_pair_count = 2;

  std::vector<std::string> prep_inputs;
  std::string prep_vocab, prep_out, prep_mode;
  noising::CorruptionConfig corruption;
  bool no_permute = false;
  double max_non_ascii = 0.1;

  std::string train, valid, vocab, out_dir, init_checkpoint, mode, variant;
  std::string dtype = "float32";
  bool resume = false;
  model::ModelConfig model;
  training::OptimizerConfig optimizer;
  training::TrainConfig run;

  std::string checkpoint, input, out;
  generation::GenerationConfig generation;

  std::string candidates, targets, eval_valid;

  std::string tests_dir, focal_dir, report;
};

void AddCommon(CLI::App* sub, Common* c, bool with_jobs) {
  sub->add_option("--config", c->config, "flat key=value file; flags override it");
  sub->add_option("--seed", c->seed, "random seed");
  if (with_jobs) {
    sub->add_option("--jobs", c->jobs, "worker threads")->check(CLI::PositiveNumber);
  }
}

void AddTrainFlags(CLI::App* sub, Flags* f) {
  sub->add_option("--train", f->train, "training JSONL")->required();
  sub->add_option("--valid", f->valid, "validation JSONL")->required();
  sub->add_option("--vocab", f->vocab, "vocabulary file")->required();
  sub->add_option("--out-dir", f->out_dir, "output directory")->required();
  sub->add_option("--init-checkpoint", f->init_checkpoint,
                  "start from this checkpoint directory");
  sub->add_option("--enc-layers", f->model.enc_layers);
  sub->add_option("--dec-layers", f->model.dec_layers);
  sub->add_option("--d-model", f->model.d_model);
  sub->add_option("--n-heads", f->model.n_heads);
  sub->add_option("--d-ff", f->model.d_ff);
  sub->add_option("--max-len", f->model.max_len);
  sub->add_option("--dropout", f->model.dropout);
  sub->add_option("--lr", f->optimizer.base_lr, "base learning rate");
  sub->add_option("--warmup", f->optimizer.warmup_steps, "warmup steps");
  sub->add_option("--accum-freq", f->optimizer.accum_freq,
                  "micro-batches per optimizer step");
  sub->add_option("--patience", f->optimizer.patience,
                  "epochs without validation improvement before stopping");
  sub->add_option("--micro-batch", f->run.micro_batch);
  sub->add_option("--max-epochs", f->run.max_epochs);
  sub->add_option("--max-steps", f->run.max_steps, "0 means no limit");
  sub->add_option("--dtype", f->dtype, "parameter precision")
      ->check(CLI::IsMember({"float32", "float64"}));
  sub->add_flag("--resume", f->resume, "continue from <out-dir>/last");
}

// Output directory whose manifest describes this run.
fs::path ManifestDir(const std::string& sub, const Flags& f) {
  if (sub == "mine") return f.mine_out;
  if (sub == "pretrain" || sub == "finetune") return f.out_dir;
  if (sub == "augment") return f.out_dir;
  fs::path file = sub == "build-vocab"     ? f.vocab_out
                  : sub == "pretrain-prep" ? f.prep_out
                                           : f.out;
  return file.has_parent_path() ? file.parent_path() : fs::path(".");
}

void WriteManifest(const CLI::App& sub, const fs::path& dir,
                   const std::string& started, std::uint64_t seed) {
  std::map<std::string, std::string> kv;
  kv["subcommand"] = sub.get_name();
  kv["tool_version"] = kToolVersion;
  kv["seed"] = std::to_string(seed);
  kv["start_time"] = started;
  kv["end_time"] = UtcNow();
  static const std::set<std::string> kInputFlags = {
      "src-dir", "focal-dir", "input", "vocab", "train", "valid",
      "init-checkpoint", "checkpoint", "candidates", "targets", "tests-dir"};
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_name(false, true);
    if (name.rfind("--", 0) != 0) continue;
    name = name.substr(2);
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    kv["config." + name] = value;
    if (opt->count() > 0 && kInputFlags.count(name)) {
      for (const auto& r : opt->results()) {
        kv["input." + name + (opt->results().size() > 1 ? "." + r : "")] =
            PathDigest(r);
      }
    }
  }
  fs::create_directories(dir);
  WriteFile(dir / "run_manifest.txt", training::FormatKeyValues(kv));
}

// Turns --config entries into leading "--key=value" arguments.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args,
                                      CLI::App& app, std::string* error) {
  if (args.empty()) return args;
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[0]);
  } catch (const CLI::Error&) {
    return args;  // the parser reports the unknown subcommand
  }
  std::map<std::string, std::string> kv;
  try {
    kv = training::ParseKeyValues(ReadFile(config));
  } catch (const Error& e) {
    *error = "--config: " + std::string(e.what());
    return {};
  }
  std::vector<std::string> out = {args[0]};
  for (const auto& [raw_key, value] : kv) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (sub->get_option_no_throw("--" + key) == nullptr || key == "config") {
      *error = "--config: unknown key '" + key + "' for " + args[0];
      return {};
    }
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Mine, train, generate, evaluate and apply assert statements",
               "assert-forge"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  Flags f;

  CLI::App* mine = app.add_subcommand("mine", "mine test-assert pairs from Java sources");
  AddCommon(mine, &f.common, true);
  mine->add_option("--src-dir", f.mine_src, "source tree to mine")
      ->required()->check(CLI::ExistingDirectory);
  mine->add_option("--focal-dir", f.mine_focal, "tree indexed for focal methods");
  mine->add_option("--out-dir", f.mine_out, "output directory")->required();
  mine->add_flag("--no-focal", f.mine.without_focal,
                 "leave the focal method out of the source");

  CLI::App* vocab = app.add_subcommand("build-vocab", "train a byte-level BPE vocabulary");
  AddCommon(vocab, &f.common, false);
  vocab->add_option("--input", f.vocab_inputs, "corpus files or directories")
      ->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  vocab->add_option("--vocab-size", f.vocab_size);
  vocab->add_option("--min-pair-count", f.min_pair_count);
  vocab->add_option("--out", f.vocab_out, "vocabulary file")->required();

  CLI::App* prep = app.add_subcommand("pretrain-prep", "build denoising pairs");
  AddCommon(prep, &f.common, false);
  prep->add_option("--input", f.prep_inputs, "corpus files or directories")
      ->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  prep->add_option("--vocab", f.prep_vocab, "vocabulary file")->required();
  prep->add_option("--mode", f.prep_mode, "noising mode")
      ->required()->check(CLI::IsMember({"english", "code"}));
  prep->add_option("--out", f.prep_out, "output JSONL")->required();
  prep->add_option("--mask-rate", f.corruption.mask_rate);
  prep->add_option("--poisson-lambda", f.corruption.poisson_lambda);
  prep->add_option("--delete-rate", f.corruption.delete_rate);
  prep->add_option("--rotate-fraction", f.corruption.rotate_fraction);
  prep->add_flag("--no-permute", f.no_permute, "keep sentence order");
  prep->add_option("--max-len", f.corruption.max_len, "truncate documents; 0 keeps them whole");
  prep->add_option("--max-non-ascii", f.max_non_ascii,
                   "drop documents with a larger non-ASCII byte fraction");

  CLI::App* pretrain = app.add_subcommand("pretrain", "denoising pretraining");
  AddCommon(pretrain, &f.common, false);
  AddTrainFlags(pretrain, &f);
  pretrain->add_option("--mode", f.mode, "corpus mode")
      ->required()->check(CLI::IsMember({"english", "code"}));

  CLI::App* finetune = app.add_subcommand("finetune", "finetune on test-assert pairs");
  AddCommon(finetune, &f.common, false);
  AddTrainFlags(finetune, &f);
  finetune->add_option("--variant", f.variant, "expected initialization lineage")
      ->check(CLI::IsMember({"scratch", "english", "code", "english+code"}));

  CLI::App* gen = app.add_subcommand("generate", "beam-search assert candidates");
  AddCommon(gen, &f.common, true);
  gen->add_option("--checkpoint", f.checkpoint, "checkpoint directory")
      ->required()->check(CLI::ExistingDirectory);
  gen->add_option("--vocab", f.vocab, "vocabulary (default: <checkpoint>/vocab.txt)");
  gen->add_option("--input", f.input, "JSONL with a source field")->required();
  gen->add_option("--out", f.out, "output JSONL")->required();
  gen->add_option("--k", f.generation.k, "candidates per source");
  gen->add_option("--beam", f.generation.beam_width, "beam width");
  gen->add_option("--max-decode-len", f.generation.max_decode_len);
  gen->add_option("--length-penalty", f.generation.length_penalty);

  CLI::App* eval = app.add_subcommand("evaluate", "score candidates against targets");
  AddCommon(eval, &f.common, false);
  eval->add_option("--candidates", f.candidates, "generate output")->required();
  eval->add_option("--targets", f.targets, "JSONL with a target field")->required();
  eval->add_option("--out", f.out, "report.json")->required();
  eval->add_option("--checkpoint", f.checkpoint, "adds validation loss with --valid");
  eval->add_option("--valid", f.eval_valid, "validation JSONL");

  CLI::App* aug = app.add_subcommand("augment", "insert generated asserts into tests");
  AddCommon(aug, &f.common, false);
  aug->add_option("--tests-dir", f.tests_dir, "test sources")
      ->required()->check(CLI::ExistingDirectory);
  aug->add_option("--candidates", f.candidates, "JSONL of per-test candidates")->required();
  aug->add_option("--out-dir", f.out_dir, "augmented sources")->required();
  aug->add_option("--report", f.report, "report.json (default: <out-dir>/report.json)");
  aug->add_option("--focal-dir", f.focal_dir, "focal classes for scope checks");

  std::string config_error;
  std::vector<std::string> expanded = ExpandConfig(args, app, &config_error);
  if (!config_error.empty()) {
    err << "error: " << config_error << "\n\n" << app.help();
    return kExitUsage;
  }
  std::reverse(expanded.begin(), expanded.end());
  try {
    app.parse(expanded);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs[0]->help());
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands()[0];
  const std::string name = sub->get_name();
  const std::string started = UtcNow();
  try {
    if (name == "mine") {
      f.mine.src_dir = f.mine_src;
      f.mine.focal_dir = f.mine_focal;
      f.mine.out_dir = f.mine_out;
      f.mine.seed = f.common.seed;
      f.mine.jobs = f.common.jobs;
      const auto st = pipeline::Mine(f.mine);
      out << "mined " << st.files << " files: " << st.candidates
          << " candidates, " << st.unresolved_focal << " without focal method\n";
    } else if (name == "build-vocab") {
      pipeline::VocabArgs a;
      for (const auto& p : f.vocab_inputs) a.inputs.emplace_back(p);
      a.vocab_size = f.vocab_size;
      a.min_pair_count = f.min_pair_count;
      a.out = f.vocab_out;
      const Vocabulary v = pipeline::BuildVocab(a);
      out << "vocabulary: " << v.size() << " tokens, digest " << v.Digest() << "\n";
    } else if (name == "pretrain-prep") {
      pipeline::PrepArgs a;
      for (const auto& p : f.prep_inputs) a.inputs.emplace_back(p);
      a.vocab = f.prep_vocab;
      a.corruption = f.corruption;
      a.corruption.mode = noising::ParseMode(f.prep_mode);
      a.corruption.permute_sentences = !f.no_permute;
      a.corruption.seed = f.common.seed;
      a.max_non_ascii = f.max_non_ascii;
      a.out = f.prep_out;
      const auto st = pipeline::PretrainPrep(a);
      out << "wrote " << st.pairs << " pairs (" << st.filter.duplicates
          << " duplicates, " << st.filter.non_ascii << " non-ASCII documents dropped)\n";
    } else if (name == "pretrain" || name == "finetune") {
      pipeline::TrainArgs a;
      a.train = f.train;
      a.valid = f.valid;
      a.vocab = f.vocab;
      a.out_dir = f.out_dir;
      if (!f.init_checkpoint.empty()) a.init_checkpoint = fs::path(f.init_checkpoint);
      a.model = f.model;
      a.optimizer = f.optimizer;
      a.optimizer.Validate();
      a.run = f.run;
      a.run.seed = f.common.seed;
      a.wide = f.dtype == "float64";
      a.stage = name;
      a.mode = f.mode;
      a.variant = f.variant;
      a.resume = f.resume;
      const auto s = pipeline::Train(a);
      out << name << " (" << s.lineage << "): " << s.steps << " steps, "
          << s.epochs << " epochs, best validation loss " << s.best_valid
          << " at epoch " << s.best_epoch
          << (s.early_stopped ? ", stopped early" : "") << "\n";
    } else if (name == "generate") {
      pipeline::GenerateArgs a;
      a.checkpoint = f.checkpoint;
      a.vocab = f.vocab;
      a.input = f.input;
      a.out = f.out;
      a.generation = f.generation;
      a.jobs = f.common.jobs;
      a.generation.Validate();
      out << "generated candidates for " << pipeline::Generate(a) << " sources\n";
    } else if (name == "evaluate") {
      pipeline::EvaluateArgs a;
      a.candidates = f.candidates;
      a.targets = f.targets;
      a.out = f.out;
      if (!f.checkpoint.empty()) a.checkpoint = fs::path(f.checkpoint);
      if (!f.eval_valid.empty()) a.valid = fs::path(f.eval_valid);
      out << pipeline::Evaluate(a).ToTable();
    } else if (name == "augment") {
      pipeline::AugmentArgs a;
      a.tests_dir = f.tests_dir;
      a.candidates = f.candidates;
      a.out_dir = f.out_dir;
      a.report = f.report.empty() ? a.out_dir / "report.json" : fs::path(f.report);
      a.focal_dir = f.focal_dir;
      const auto s = pipeline::Augment(a);
      out << "augmented " << s.augmented << " of " << s.tests << " tests ("
          << s.none << " without a usable assert)\n";
    }
    WriteManifest(*sub, ManifestDir(name, f), started, f.common.seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Dispatch(args, std::cout, std::cerr);
}

}  // namespace assertforge::cli
