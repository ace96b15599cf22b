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

#include "assertforge/pipeline.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "assertforge/augmentation.h"
#include "assertforge/parallel.h"
#include "json.hpp"

namespace assertforge::pipeline {
namespace {

using Json = nlohmann::ordered_json;

std::vector<Json> ReadJsonl(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<Json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (NormalizeWhitespace(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": invalid JSON: " + e.what());
    }
  }
  return out;
}

std::string GetString(const Json& j, const char* key, const fs::path& path) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw IoError(path.string() + ": record lacks string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::vector<fs::path> SortedFiles(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (!ext.empty() && e.path().extension() != ext) continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<int> IdArray(const Json& j, const fs::path& path) {
  std::vector<int> ids;
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      throw IoError(path.string() + ": id arrays must hold integers");
    }
    ids.push_back(v.get<int>());
  }
  return ids;
}

void CheckDigest(const training::CheckpointMeta& meta, const Vocabulary& vocab,
                 const fs::path& where) {
  if (meta.vocab_digest != vocab.Digest()) {
    throw ConfigError("vocabulary digest " + vocab.Digest() +
                      " does not match checkpoint " + where.string() + " (" +
                      meta.vocab_digest + ")");
  }
}

template <typename S>
TrainSummary TrainTyped(const TrainArgs& args) {
  const Vocabulary vocab = Vocabulary::Load(args.vocab);
  const auto train = LoadExamples(args.train, vocab);
  const auto valid = LoadExamples(args.valid, vocab);
  if (train.empty()) throw EmptyCorpusError("no training examples in " + args.train.string());

  model::Parameters<S> params;
  std::string init_lineage = "scratch";
  if (args.init_checkpoint) {
    auto init = training::LoadCheckpoint<S>(*args.init_checkpoint);
    CheckDigest(init.meta, vocab, *args.init_checkpoint);
    if (init.meta.stage == "finetune") {
      throw ConfigError("init checkpoint " + args.init_checkpoint->string() +
                        " is already finetuned");
    }
    init_lineage = init.meta.lineage;
    params = std::move(init.params);
  } else {
    model::ModelConfig cfg = args.model;
    cfg.vocab_size = vocab.size();
    cfg.Validate();
    params = model::Parameters<S>::Init(cfg, args.run.seed);
  }
  const std::string lineage = NextLineage(init_lineage, args.stage, args.mode);
  if (!args.variant.empty() && args.variant != lineage) {
    throw ConfigError("variant '" + args.variant + "' needs a matching init "
                      "checkpoint, but the lineage here is '" + lineage + "'");
  }

  training::CheckpointMeta meta;
  meta.model = params.config();
  meta.optimizer = args.optimizer;
  meta.vocab_digest = vocab.Digest();
  meta.lineage = lineage;
  meta.stage = args.stage;
  meta.seed = args.run.seed;
  if (!args.mode.empty()) meta.extra["mode"] = args.mode;

  const fs::path last_dir = args.out_dir / "last";
  const fs::path best_dir = args.out_dir / "best";
  const fs::path curve_path = args.out_dir / "loss_curve.csv";
  training::Trainer<S> trainer(params, args.optimizer, args.run);
  std::string prior_curve;
  if (args.resume && fs::exists(last_dir / "manifest.txt")) {
    auto last = training::LoadCheckpoint<S>(last_dir);
    CheckDigest(last.meta, vocab, last_dir);
    if (last.meta.lineage != lineage || !last.state) {
      throw ConfigError("cannot resume from " + last_dir.string());
    }
    std::optional<model::Parameters<S>> best;
    if (fs::exists(best_dir / "manifest.txt")) {
      best = training::LoadCheckpoint<S>(best_dir).params;
    }
    trainer = training::Trainer<S>(std::move(last.params), args.optimizer, args.run);
    trainer.Restore(std::move(*last.state), last.meta.progress, std::move(best));
    if (fs::exists(curve_path)) {
      prior_curve = ReadFile(curve_path);
      prior_curve = prior_curve.substr(std::min(prior_curve.size(),
                                                prior_curve.find('\n') + 1));
    }
  }

  auto save = [&](const training::Trainer<S>& t) {
    training::CheckpointMeta m = meta;
    m.progress = t.progress();
    m.step = t.state().step;
    training::SaveCheckpoint(last_dir, m, t.params(), &t.state());
    vocab.Save(last_dir / "vocab.txt");
    training::SaveCheckpoint(best_dir, m, t.best_params());
    vocab.Save(best_dir / "vocab.txt");
    training::WriteLossCurve(curve_path, t.curve());
    if (!prior_curve.empty()) {
      std::string text = ReadFile(curve_path);
      const std::size_t header = text.find('\n') + 1;
      WriteFile(curve_path, text.substr(0, header) + prior_curve + text.substr(header));
    }
  };
  fs::create_directories(args.out_dir);
  trainer.Run(train, valid, save);
  save(trainer);

  TrainSummary s;
  s.lineage = lineage;
  s.steps = trainer.state().step;
  s.epochs = trainer.progress().epoch;
  s.best_valid = trainer.progress().best_valid;
  s.best_epoch = trainer.progress().best_epoch;
  s.early_stopped = trainer.progress().early_stopped;
  return s;
}

template <typename S>
std::size_t GenerateTyped(const GenerateArgs& args) {
  auto ck = training::LoadCheckpoint<S>(args.checkpoint);
  const fs::path vocab_path =
      args.vocab.empty() ? args.checkpoint / "vocab.txt" : args.vocab;
  const Vocabulary vocab = Vocabulary::Load(vocab_path);
  CheckDigest(ck.meta, vocab, args.checkpoint);
  std::vector<std::string> sources;
  for (const Json& j : ReadJsonl(args.input)) {
    sources.push_back(GetString(j, "source", args.input));
  }
  const model::Transformer<S> net(ck.params);
  std::vector<std::vector<std::string>> results(sources.size());
  ParallelFor(sources.size(), args.jobs, [&](std::size_t i) {
    results[i] = generation::GenerateTopK(net, sources[i], vocab, args.generation);
  });
  std::string out;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Json j;
    j["source"] = sources[i];
    j["candidates"] = results[i];
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  }
  WriteFile(args.out, out);
  return sources.size();
}

template <typename S>
double ValidLoss(const fs::path& checkpoint, const fs::path& valid) {
  auto ck = training::LoadCheckpoint<S>(checkpoint);
  const Vocabulary vocab = Vocabulary::Load(checkpoint / "vocab.txt");
  CheckDigest(ck.meta, vocab, checkpoint);
  return model::MeanLoss(ck.params, LoadExamples(valid, vocab));
}

bool IsWide(const fs::path& checkpoint) {
  return training::LoadCheckpointMeta(checkpoint).dtype == "float64";
}

// Focal class source for a test class, looked up by file name.
std::string FindFocalSource(const fs::path& focal_dir, const std::string& test_class) {
  if (focal_dir.empty() || !fs::exists(focal_dir)) return "";
  std::string name = test_class;
  for (std::string_view suffix : {"_ESTest", "Test"}) {
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      name.resize(name.size() - suffix.size());
      break;
    }
  }
  name = mining::FocalClassFor(name);
  for (const auto& f : SortedFiles(focal_dir, ".java")) {
    if (f.stem() == name) return ReadFile(f);
  }
  return "";
}

}  // namespace

// ---- mine -----------------------------------------------------------------

mining::MiningStats Mine(const MineArgs& args) {
  mining::MiningOptions opts;
  opts.src_dir = args.src_dir;
  opts.focal_dir = args.focal_dir;
  opts.jobs = args.jobs;
  opts.without_focal = args.without_focal;
  mining::MiningResult result = mining::MineDirectory(opts);
  mining::CorpusSplit split =
      mining::SplitCorpus(std::move(result.taps), mining::SplitRatios{}, args.seed);
  fs::create_directories(args.out_dir);
  WriteFile(args.out_dir / "train.jsonl", mining::ToJsonl(split.train));
  WriteFile(args.out_dir / "valid.jsonl", mining::ToJsonl(split.valid));
  WriteFile(args.out_dir / "test.jsonl", mining::ToJsonl(split.test));
  const auto& st = result.stats;
  std::map<std::string, std::string> kv = {
      {"files", std::to_string(st.files)},
      {"parse_errors", std::to_string(st.parse_errors)},
      {"test_methods", std::to_string(st.test_methods)},
      {"candidates", std::to_string(st.candidates)},
      {"unresolved_focal", std::to_string(st.unresolved_focal)},
      {"replacement_errors", std::to_string(st.replacement_errors)},
      {"train", std::to_string(split.train.size())},
      {"valid", std::to_string(split.valid.size())},
      {"test", std::to_string(split.test.size())}};
  WriteFile(args.out_dir / "mining_stats.txt", training::FormatKeyValues(kv));
  return st;
}

// ---- build-vocab ----------------------------------------------------------

std::vector<std::string> ReadDocuments(const fs::path& input) {
  std::vector<std::string> docs;
  if (fs::is_directory(input)) {
    for (const auto& f : SortedFiles(input, "")) docs.push_back(ReadFile(f));
    return docs;
  }
  if (input.extension() == ".jsonl") {
    for (const Json& j : ReadJsonl(input)) {
      bool any = false;
      for (const char* key : {"source", "target", "text"}) {
        auto it = j.find(key);
        if (it != j.end() && it->is_string()) {
          docs.push_back(it->get<std::string>());
          any = true;
        }
      }
      if (!any) throw IoError(input.string() + ": record has no text field");
    }
    return docs;
  }
  std::istringstream in(ReadFile(input));
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(line);
  }
  return docs;
}

Vocabulary BuildVocab(const VocabArgs& args) {
  std::vector<std::string> corpus;
  for (const auto& p : args.inputs) {
    auto docs = ReadDocuments(p);
    corpus.insert(corpus.end(), std::make_move_iterator(docs.begin()),
                  std::make_move_iterator(docs.end()));
  }
  Vocabulary vocab = Vocabulary::Train(corpus, args.vocab_size, args.min_pair_count);
  if (!args.out.empty()) {
    if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
    vocab.Save(args.out);
  }
  return vocab;
}

// ---- pretrain-prep --------------------------------------------------------

PrepStats PretrainPrep(const PrepArgs& args) {
  args.corruption.Validate();
  const Vocabulary vocab = Vocabulary::Load(args.vocab);
  std::vector<std::string> docs;
  for (const auto& p : args.inputs) {
    auto d = ReadDocuments(p);
    docs.insert(docs.end(), std::make_move_iterator(d.begin()),
                std::make_move_iterator(d.end()));
  }
  PrepStats stats;
  docs = noising::FilterDocuments(std::move(docs), args.max_non_ascii, &stats.filter);
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto ids = vocab.Encode(docs[i]).ids;
    const auto pair = noising::MakeDenoisingPair(ids, args.corruption, i, vocab);
    if (pair.target.empty() || pair.source.empty()) continue;
    Json j;
    j["source"] = pair.source;
    j["target"] = pair.target;
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
    ++stats.pairs;
    stats.source_tokens += pair.source.size();
    stats.target_tokens += pair.target.size();
  }
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  WriteFile(args.out, out);
  return stats;
}

// ---- pretrain / finetune --------------------------------------------------

std::vector<model::Example> LoadExamples(const fs::path& path,
                                         const Vocabulary& vocab) {
  std::vector<model::Example> out;
  for (const Json& j : ReadJsonl(path)) {
    model::Example ex;
    for (auto [key, field] : {std::pair{"source", &ex.source},
                              std::pair{"target", &ex.target}}) {
      auto it = j.find(key);
      if (it == j.end()) {
        throw IoError(path.string() + ": record lacks '" + key + "'");
      }
      if (it->is_array()) {
        *field = IdArray(*it, path);
      } else if (it->is_string()) {
        *field = vocab.Encode(it->get<std::string>()).ids;
      } else {
        throw IoError(path.string() + ": '" + key + "' must be text or ids");
      }
      for (int id : *field) {
        if (id < 0 || id >= vocab.size()) {
          throw IoError(path.string() + ": token id " + std::to_string(id) +
                        " outside the vocabulary");
        }
      }
    }
    if (!ex.target.empty()) out.push_back(std::move(ex));
  }
  return out;
}

std::string NextLineage(const std::string& init_lineage,
                        const std::string& stage, const std::string& mode) {
  if (stage == "finetune") return init_lineage;
  if (stage != "pretrain") throw ConfigError("unknown stage '" + stage + "'");
  noising::ParseMode(mode);  // validates
  if (init_lineage == "scratch") return mode;
  const std::string next = init_lineage + "+" + mode;
  if (next != "english+code") {
    throw ConfigError("pretraining '" + mode + "' on top of '" + init_lineage +
                      "' is not one of the supported chains");
  }
  return next;
}

TrainSummary Train(const TrainArgs& args) {
  bool wide = args.wide;
  if (args.init_checkpoint && !args.wide) {
    // Keep the precision the chain started with.
    wide = IsWide(*args.init_checkpoint);
  }
  return wide ? TrainTyped<double>(args) : TrainTyped<float>(args);
}

// ---- generate -------------------------------------------------------------

std::size_t Generate(const GenerateArgs& args) {
  return IsWide(args.checkpoint) ? GenerateTyped<double>(args)
                                 : GenerateTyped<float>(args);
}

// ---- evaluate -------------------------------------------------------------

evaluation::EvalReport Evaluate(const EvaluateArgs& args) {
  std::vector<std::vector<std::string>> candidates;
  for (const Json& j : ReadJsonl(args.candidates)) {
    auto it = j.find("candidates");
    if (it == j.end() || !it->is_array()) {
      throw IoError(args.candidates.string() + ": record lacks 'candidates'");
    }
    candidates.push_back(it->get<std::vector<std::string>>());
  }
  std::vector<std::string> targets;
  for (const Json& j : ReadJsonl(args.targets)) {
    targets.push_back(GetString(j, "target", args.targets));
  }
  std::optional<double> loss;
  if (args.checkpoint && args.valid) {
    loss = IsWide(*args.checkpoint) ? ValidLoss<double>(*args.checkpoint, *args.valid)
                                    : ValidLoss<float>(*args.checkpoint, *args.valid);
  }
  evaluation::EvalReport report = evaluation::Evaluate(candidates, targets, loss);
  if (!args.out.empty()) {
    if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
    WriteFile(args.out, report.ToJson());
    fs::path table = args.out;
    table.replace_extension(".txt");
    WriteFile(table, report.ToTable());
  }
  return report;
}

// ---- augment --------------------------------------------------------------

AugmentSummary Augment(const AugmentArgs& args) {
  struct Request {
    std::string test;
    std::string focal;
    std::string focal_file;
    std::vector<std::string> candidates;
  };
  std::map<std::string, std::vector<Request>> by_file;
  for (const Json& j : ReadJsonl(args.candidates)) {
    Request r;
    r.test = GetString(j, "test", args.candidates);
    r.focal = j.value("focal", std::string());
    r.focal_file = j.value("focal_file", std::string());
    r.candidates = j.at("candidates").get<std::vector<std::string>>();
    by_file[GetString(j, "file", args.candidates)].push_back(std::move(r));
  }

  AugmentSummary summary;
  Json rows = Json::array();
  std::ostringstream table;
  table << "Focal method                         Assert\n";
  for (const auto& path : SortedFiles(args.tests_dir, ".java")) {
    const std::string rel = fs::relative(path, args.tests_dir).generic_string();
    std::string source = ReadFile(path);
    auto it = by_file.find(rel);
    if (it != by_file.end()) {
      const auto classes = mining::ParseJava(source);
      struct Edit {
        mining::Span span;
        std::string text;
      };
      std::vector<Edit> edits;
      for (const Request& req : it->second) {
        const mining::JavaMethod* method = nullptr;
        for (const auto& cls : classes) {
          for (const auto& m : cls.methods) {
            if (m.name == req.test && method == nullptr) method = &m;
          }
        }
        if (method == nullptr) {
          throw IoError(rel + ": no test method named " + req.test);
        }
        const std::string focal_source =
            !req.focal_file.empty()
                ? ReadFile(args.focal_dir / req.focal_file)
                : FindFocalSource(args.focal_dir, method->class_name);
        const std::string original = source.substr(
            method->text_span.begin, method->text_span.end - method->text_span.begin);
        const auto result = augmentation::Augment(req.candidates, original, focal_source);
        ++summary.tests;
        Json row;
        row["file"] = rel;
        row["test"] = req.test;
        row["focal"] = req.focal;
        row["assert"] = result.chosen_assert ? *result.chosen_assert : "-";
        Json rejected = Json::array();
        for (const auto& rj : result.rejected) {
          rejected.push_back({{"candidate", rj.candidate}, {"reason", rj.reason}});
        }
        row["rejected"] = rejected;
        rows.push_back(row);
        std::string label = req.focal.empty() ? req.test : req.focal;
        label.resize(std::max<std::size_t>(label.size(), 36), ' ');
        table << label << ' ' << (result.chosen_assert ? *result.chosen_assert : "-")
              << "\n";
        if (result.augmented_test) {
          ++summary.augmented;
          edits.push_back({method->text_span, *result.augmented_test});
        } else {
          ++summary.none;
        }
      }
      std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
        return a.span.begin > b.span.begin;
      });
      for (const Edit& e : edits) {
        source = source.substr(0, e.span.begin) + e.text + source.substr(e.span.end);
      }
      mining::ParseJava(source);  // the whole file must still parse
    }
    const fs::path out = args.out_dir / rel;
    fs::create_directories(out.parent_path());
    WriteFile(out, source);
  }
  Json report;
  report["tests"] = summary.tests;
  report["augmented"] = summary.augmented;
  report["none"] = summary.none;
  report["rows"] = rows;
  if (!args.report.empty()) {
    if (args.report.has_parent_path()) fs::create_directories(args.report.parent_path());
    WriteFile(args.report, report.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
    fs::path txt = args.report;
    txt.replace_extension(".txt");
    WriteFile(txt, table.str());
  }
  return summary;
}

}  // namespace assertforge::pipeline
