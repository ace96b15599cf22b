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

#include "assertforge/training.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <sstream>
#include <type_traits>

namespace assertforge::training {
namespace {

constexpr std::uint64_t kDropoutStream = 0x6a09e667f3bcc908ULL;
constexpr std::string_view kCheckpointFormat = "assertforge-checkpoint-v1";

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDoubleValue(const std::string& key, const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad number for " + key + ": '" + text + "'");
}

std::int64_t ParseIntValue(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad integer for " + key + ": '" + text + "'");
}

const std::string& Require(const std::map<std::string, std::string>& kv,
                           const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("checkpoint manifest lacks " + key);
  return it->second;
}

std::map<std::string, std::string> WithPrefix(
    const std::map<std::string, std::string>& kv, const std::string& prefix) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : kv) {
    if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
  }
  return out;
}

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittleEndian(const char* p) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

template <typename S>
std::string EncodeBlob(const std::vector<S>& data, bool wide) {
  std::string out;
  out.reserve(data.size() * (wide ? 8 : 4));
  for (S v : data) {
    if (wide) {
      AppendLittleEndian(out, static_cast<double>(v));
    } else {
      AppendLittleEndian(out, static_cast<float>(v));
    }
  }
  return out;
}

template <typename S>
std::vector<S> DecodeBlob(const std::string& blob, bool wide, std::size_t n,
                          const std::string& what) {
  const std::size_t width = wide ? 8 : 4;
  if (blob.size() != n * width) {
    throw IoError("blob " + what + " has " + std::to_string(blob.size()) +
                  " bytes, expected " + std::to_string(n * width));
  }
  std::vector<S> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = wide ? static_cast<S>(ReadLittleEndian<double>(&blob[i * 8]))
                  : static_cast<S>(ReadLittleEndian<float>(&blob[i * 4]));
  }
  return out;
}

template <typename S>
void WriteTensors(const std::filesystem::path& dir, const Parameters<S>& p,
                  bool wide) {
  for (const auto& t : p.tensors()) {
    WriteFile(dir / (t.name + ".bin"), EncodeBlob(t.data, wide));
  }
}

template <typename S>
void ReadTensors(const std::filesystem::path& dir, Parameters<S>& p, bool wide) {
  for (auto& t : p.tensors()) {
    t.data = DecodeBlob<S>(ReadFile(dir / (t.name + ".bin")), wide,
                           t.data.size(), t.name);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Optimizer

void OptimizerConfig::Validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(base_lr > 0.0)) throw ConfigError("base_lr must be positive");
  if (warmup_steps < 1) throw ConfigError("warmup_steps must be at least 1");
  if (accum_freq < 1) throw ConfigError("accum_freq must be at least 1");
  if (patience < 0) throw ConfigError("patience must be non-negative");
}

std::map<std::string, std::string> OptimizerConfig::ToMap() const {
  return {{"beta1", FormatDouble(beta1)},
          {"beta2", FormatDouble(beta2)},
          {"epsilon", FormatDouble(epsilon)},
          {"base_lr", FormatDouble(base_lr)},
          {"warmup_steps", std::to_string(warmup_steps)},
          {"accum_freq", std::to_string(accum_freq)},
          {"patience", std::to_string(patience)}};
}

OptimizerConfig OptimizerConfig::FromMap(
    const std::map<std::string, std::string>& kv) {
  OptimizerConfig c;
  auto num = [&](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) {
      field = ParseDoubleValue(key, it->second);
    }
  };
  auto integer = [&](const char* key, int& field) {
    if (auto it = kv.find(key); it != kv.end()) {
      field = static_cast<int>(ParseIntValue(key, it->second));
    }
  };
  num("beta1", c.beta1);
  num("beta2", c.beta2);
  num("epsilon", c.epsilon);
  num("base_lr", c.base_lr);
  integer("warmup_steps", c.warmup_steps);
  integer("accum_freq", c.accum_freq);
  integer("patience", c.patience);
  return c;
}

double LrAt(std::int64_t step, const OptimizerConfig& cfg) {
  const double s = static_cast<double>(std::max<std::int64_t>(step, 1));
  const double w = static_cast<double>(cfg.warmup_steps);
  if (s <= w) return cfg.base_lr * s / w;
  return cfg.base_lr * std::sqrt(w / s);
}

template <typename S>
void AdamStep(Parameters<S>& params, const Parameters<S>& grads,
              OptimizerState<S>& state, const OptimizerConfig& cfg) {
  if (state.m.tensors().size() != params.tensors().size()) {
    state = OptimizerState<S>(params.config());
  }
  if (!grads.AllFinite()) {
    throw NonFiniteUpdateError("non-finite gradient entry");
  }
  const std::int64_t t = state.step + 1;
  const S lr = static_cast<S>(LrAt(t, cfg));
  const S b1 = static_cast<S>(cfg.beta1);
  const S b2 = static_cast<S>(cfg.beta2);
  const S eps = static_cast<S>(cfg.epsilon);
  const S c1 = S(1) - static_cast<S>(std::pow(cfg.beta1, static_cast<double>(t)));
  const S c2 = S(1) - static_cast<S>(std::pow(cfg.beta2, static_cast<double>(t)));
  auto update = [&](S g, S m, S v, S* m_out, S* v_out) {
    *m_out = b1 * m + (S(1) - b1) * g;
    *v_out = b2 * v + (S(1) - b2) * g * g;
    const S m_hat = *m_out / c1;
    const S v_hat = *v_out / c2;
    return lr * m_hat / (std::sqrt(v_hat) + eps);
  };
  // First pass only checks, so a failure leaves the state untouched.
  for (std::size_t i = 0; i < params.tensors().size(); ++i) {
    const auto& g = grads.tensors()[i].data;
    const auto& m = state.m.tensors()[i].data;
    const auto& v = state.v.tensors()[i].data;
    const auto& p = params.tensors()[i].data;
    for (std::size_t j = 0; j < g.size(); ++j) {
      S mo, vo;
      const S u = update(g[j], m[j], v[j], &mo, &vo);
      if (!std::isfinite(p[j] - u)) {
        throw NonFiniteUpdateError("non-finite update for " +
                                   params.tensors()[i].name);
      }
    }
  }
  for (std::size_t i = 0; i < params.tensors().size(); ++i) {
    const auto& g = grads.tensors()[i].data;
    auto& m = state.m.tensors()[i].data;
    auto& v = state.v.tensors()[i].data;
    auto& p = params.tensors()[i].data;
    for (std::size_t j = 0; j < g.size(); ++j) {
      p[j] -= update(g[j], m[j], v[j], &m[j], &v[j]);
    }
  }
  state.step = t;
}

// ---------------------------------------------------------------------------
// Batching

std::vector<std::vector<std::vector<std::size_t>>> StepGroups(
    const std::vector<Example>& data, int max_len, int micro_batch,
    int accum_freq, std::uint64_t seed, int epoch) {
  if (micro_batch < 1) throw ConfigError("micro_batch must be at least 1");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(MixSeed(seed, static_cast<std::uint64_t>(epoch)));
  ShuffleInPlace(order, rng);
  const auto cap = static_cast<std::size_t>(std::max(max_len - 1, 0));
  auto length = [&](std::size_t i) {
    return std::min(data[i].source.size(), cap) +
           std::min(data[i].target.size(), cap);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return length(a) < length(b); });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(micro_batch)) {
    const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(micro_batch));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  std::vector<std::vector<std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < batches.size(); i += static_cast<std::size_t>(accum_freq)) {
    const std::size_t end = std::min(batches.size(), i + static_cast<std::size_t>(accum_freq));
    groups.emplace_back(batches.begin() + static_cast<std::ptrdiff_t>(i),
                        batches.begin() + static_cast<std::ptrdiff_t>(end));
  }
  ShuffleInPlace(groups, rng);
  return groups;
}

void WriteLossCurve(const std::filesystem::path& path,
                    const std::vector<LossPoint>& curve) {
  std::ostringstream out;
  out << "step,split,loss\n";
  for (const LossPoint& p : curve) {
    out << p.step << ',' << p.split << ',' << FormatDouble(p.loss) << '\n';
  }
  WriteFile(path, out.str());
}

// ---------------------------------------------------------------------------
// Trainer

template <typename S>
Trainer<S>::Trainer(Parameters<S> init, OptimizerConfig opt, TrainConfig run)
    : params_(std::move(init)),
      best_(params_),
      grads_(params_.config()),
      state_(params_.config()),
      opt_(opt),
      run_(run) {
  opt_.Validate();
  if (run_.micro_batch < 1) throw ConfigError("micro_batch must be at least 1");
}

template <typename S>
void Trainer<S>::Restore(OptimizerState<S> state, Progress progress,
                         std::optional<Parameters<S>> best) {
  state_ = std::move(state);
  progress_ = progress;
  best_ = best ? std::move(*best) : params_;
}

template <typename S>
double Trainer<S>::Step(const std::vector<Example>& data,
                        const std::vector<std::vector<std::size_t>>& group) {
  const int max_len = params_.config().max_len;
  std::size_t tokens = 0;
  for (const auto& batch : group) {
    for (std::size_t i : batch) {
      tokens += model::DecoderLabels(data[i].target, max_len).size();
    }
  }
  if (tokens == 0) throw ShapeError("empty step group");
  const S scale = S(1) / static_cast<S>(tokens);
  grads_.SetZero();
  Rng dropout(MixSeed(run_.seed ^ kDropoutStream,
                      static_cast<std::uint64_t>(state_.step + 1)));
  Rng* dropout_rng = params_.config().dropout > 0.0 ? &dropout : nullptr;
  const model::Transformer<S> net(params_);
  double loss = 0;
  for (const auto& batch : group) {
    for (std::size_t i : batch) {
      loss += static_cast<double>(net.LossAndGradient(
          model::EncoderInput(data[i].source, max_len),
          model::DecoderInput(data[i].target, max_len),
          model::DecoderLabels(data[i].target, max_len), &grads_, scale,
          dropout_rng));
    }
  }
  AdamStep(params_, grads_, state_, opt_);
  const double mean = loss / static_cast<double>(tokens);
  curve_.push_back({state_.step, "train", mean});
  return mean;
}

template <typename S>
void Trainer<S>::Run(const std::vector<Example>& train,
                     const std::vector<Example>& valid,
                     const std::function<void(const Trainer&)>& on_epoch) {
  if (train.empty()) throw EmptyCorpusError("training set is empty");
  const int max_len = params_.config().max_len;
  while (!progress_.finished) {
    const bool step_limit = run_.max_steps > 0 && state_.step >= run_.max_steps;
    if (progress_.epoch >= run_.max_epochs || step_limit) {
      progress_.finished = true;
      break;
    }
    const auto groups = StepGroups(train, max_len, run_.micro_batch,
                                   opt_.accum_freq, run_.seed, progress_.epoch);
    bool cut = false;
    while (progress_.cursor < groups.size()) {
      if (run_.max_steps > 0 && state_.step >= run_.max_steps) {
        cut = true;
        break;
      }
      Step(train, groups[progress_.cursor]);
      ++progress_.cursor;
    }
    if (!cut) {
      progress_.cursor = 0;
      ++progress_.epoch;
    }
    if (valid.empty()) {
      best_ = params_;
      progress_.best_epoch = progress_.epoch;
    } else {
      const double v = model::MeanLoss(params_, valid);
      curve_.push_back({state_.step, "valid", v});
      if (v < progress_.best_valid) {
        progress_.best_valid = v;
        progress_.best_epoch = progress_.epoch;
        progress_.epochs_since_best = 0;
        best_ = params_;
      } else {
        ++progress_.epochs_since_best;
      }
    }
    if (!valid.empty() && progress_.epochs_since_best >= opt_.patience) {
      progress_.early_stopped = true;
      progress_.finished = true;
    }
    if (cut) progress_.finished = true;
    if (on_epoch) on_epoch(*this);
  }
}

template <typename S>
void Trainer<S>::RunSteps(const std::vector<Example>& train, std::int64_t steps) {
  if (train.empty()) throw EmptyCorpusError("training set is empty");
  const int max_len = params_.config().max_len;
  std::int64_t done = 0;
  while (done < steps) {
    const auto groups = StepGroups(train, max_len, run_.micro_batch,
                                   opt_.accum_freq, run_.seed, progress_.epoch);
    while (progress_.cursor < groups.size() && done < steps) {
      Step(train, groups[progress_.cursor]);
      ++progress_.cursor;
      ++done;
    }
    if (progress_.cursor >= groups.size()) {
      progress_.cursor = 0;
      ++progress_.epoch;
    }
  }
}

// ---------------------------------------------------------------------------
// Checkpoints

std::map<std::string, std::string> ParseKeyValues(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string FormatKeyValues(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

template <typename S>
void SaveCheckpoint(const std::filesystem::path& dir, const CheckpointMeta& meta,
                    const Parameters<S>& params, const OptimizerState<S>* state) {
  const bool wide = std::is_same_v<S, double>;
  std::map<std::string, std::string> kv;
  kv["format"] = std::string(kCheckpointFormat);
  kv["dtype"] = wide ? "float64" : "float32";
  kv["vocab_digest"] = meta.vocab_digest;
  kv["lineage"] = meta.lineage;
  kv["stage"] = meta.stage;
  kv["step"] = std::to_string(state != nullptr ? state->step : meta.step);
  kv["seed"] = std::to_string(meta.seed);
  kv["epoch"] = std::to_string(meta.progress.epoch);
  kv["cursor"] = std::to_string(meta.progress.cursor);
  kv["best_valid"] = FormatDouble(meta.progress.best_valid);
  kv["best_epoch"] = std::to_string(meta.progress.best_epoch);
  kv["epochs_since_best"] = std::to_string(meta.progress.epochs_since_best);
  kv["finished"] = meta.progress.finished ? "1" : "0";
  kv["early_stopped"] = meta.progress.early_stopped ? "1" : "0";
  kv["has_optimizer"] = state != nullptr ? "1" : "0";
  for (const auto& [k, v] : meta.model.ToMap()) kv["model." + k] = v;
  for (const auto& [k, v] : meta.optimizer.ToMap()) kv["optim." + k] = v;
  for (const auto& [k, v] : meta.extra) kv["extra." + k] = v;

  std::filesystem::create_directories(dir);
  std::ostringstream index;
  for (const auto& t : params.tensors()) {
    index << t.name << ' ' << kv["dtype"];
    for (int s : t.shape) index << ' ' << s;
    index << '\n';
  }
  WriteTensors(dir / "tensors", params, wide);
  if (state != nullptr) {
    WriteTensors(dir / "optimizer" / "m", state->m, wide);
    WriteTensors(dir / "optimizer" / "v", state->v, wide);
  }
  WriteFile(dir / "index.txt", index.str());
  // The manifest goes last so a complete manifest implies complete blobs.
  WriteFile(dir / "manifest.txt", FormatKeyValues(kv));
}

CheckpointMeta LoadCheckpointMeta(const std::filesystem::path& dir) {
  const auto kv = ParseKeyValues(ReadFile(dir / "manifest.txt"));
  if (Require(kv, "format") != kCheckpointFormat) {
    throw ConfigError(dir.string() + " is not a checkpoint directory");
  }
  CheckpointMeta meta;
  meta.model = ModelConfig::FromMap(WithPrefix(kv, "model."));
  meta.optimizer = OptimizerConfig::FromMap(WithPrefix(kv, "optim."));
  meta.extra = WithPrefix(kv, "extra.");
  meta.vocab_digest = Require(kv, "vocab_digest");
  meta.lineage = Require(kv, "lineage");
  meta.stage = Require(kv, "stage");
  meta.dtype = Require(kv, "dtype");
  meta.step = ParseIntValue("step", Require(kv, "step"));
  meta.seed = static_cast<std::uint64_t>(std::stoull(Require(kv, "seed")));
  meta.progress.epoch = static_cast<int>(ParseIntValue("epoch", Require(kv, "epoch")));
  meta.progress.cursor =
      static_cast<std::size_t>(ParseIntValue("cursor", Require(kv, "cursor")));
  meta.progress.best_valid = ParseDoubleValue("best_valid", Require(kv, "best_valid"));
  meta.progress.best_epoch =
      static_cast<int>(ParseIntValue("best_epoch", Require(kv, "best_epoch")));
  meta.progress.epochs_since_best = static_cast<int>(
      ParseIntValue("epochs_since_best", Require(kv, "epochs_since_best")));
  meta.progress.finished = Require(kv, "finished") == "1";
  meta.progress.early_stopped = Require(kv, "early_stopped") == "1";
  if (meta.dtype != "float32" && meta.dtype != "float64") {
    throw ConfigError("unknown checkpoint dtype " + meta.dtype);
  }
  return meta;
}

template <typename S>
Checkpoint<S> LoadCheckpoint(const std::filesystem::path& dir) {
  Checkpoint<S> ck;
  ck.meta = LoadCheckpointMeta(dir);
  const bool wide = ck.meta.dtype == "float64";
  ck.params = Parameters<S>(ck.meta.model);
  // Cross-check the index against the tensor layout the config implies.
  std::istringstream index(ReadFile(dir / "index.txt"));
  for (const auto& t : ck.params.tensors()) {
    std::string line;
    if (!std::getline(index, line)) throw IoError("index.txt is truncated");
    std::istringstream fields(line);
    std::string name, dtype;
    fields >> name >> dtype;
    std::vector<int> shape;
    for (int s; fields >> s;) shape.push_back(s);
    if (name != t.name || shape != t.shape) {
      throw ShapeError("checkpoint tensor " + name +
                       " does not match the configured layout (expected " +
                       t.name + ")");
    }
  }
  ReadTensors(dir / "tensors", ck.params, wide);
  const auto kv = ParseKeyValues(ReadFile(dir / "manifest.txt"));
  if (Require(kv, "has_optimizer") == "1") {
    OptimizerState<S> st(ck.meta.model);
    st.step = ck.meta.step;
    ReadTensors(dir / "optimizer" / "m", st.m, wide);
    ReadTensors(dir / "optimizer" / "v", st.v, wide);
    ck.state = std::move(st);
  }
  return ck;
}

#define ASSERTFORGE_INSTANTIATE(S)                                             \
  template void AdamStep<S>(Parameters<S>&, const Parameters<S>&,              \
                            OptimizerState<S>&, const OptimizerConfig&);       \
  template class Trainer<S>;                                                   \
  template void SaveCheckpoint<S>(const std::filesystem::path&,                \
                                  const CheckpointMeta&, const Parameters<S>&, \
                                  const OptimizerState<S>*);                   \
  template Checkpoint<S> LoadCheckpoint<S>(const std::filesystem::path&);

ASSERTFORGE_INSTANTIATE(float)
ASSERTFORGE_INSTANTIATE(double)

#undef ASSERTFORGE_INSTANTIATE

}  // namespace assertforge::training
