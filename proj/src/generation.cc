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

#include "assertforge/generation.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_set>

namespace assertforge::generation {
namespace {

template <typename S>
struct Live {
  std::vector<int> ids;
  double logprob;
  std::shared_ptr<typename model::Transformer<S>::DecodeState> state;
  std::vector<S> next;  // log-probs of the following token
};

struct Candidate {
  std::size_t parent;
  int token;
  double logprob;
};

double Normalize(double logprob, int length, double alpha) {
  if (alpha == 0.0) return logprob;
  return logprob / std::pow(static_cast<double>(std::max(length, 1)), alpha);
}

// Lexicographic order of parent ids extended by one token. Every live
// hypothesis at a given step has the same length.
bool ExtendedLess(const std::vector<int>& a, int ta, const std::vector<int>& b,
                  int tb) {
  if (a != b) return a < b;
  return ta < tb;
}

}  // namespace

void GenerationConfig::Validate(bool allow_wide) const {
  if (beam_width < 1) throw ConfigError("beam_width must be at least 1");
  if (!allow_wide && beam_width > kMaxBeamWidth) {
    throw ConfigError("beam_width must not exceed " +
                      std::to_string(kMaxBeamWidth));
  }
  if (k < 1 || k > beam_width) {
    throw ConfigError("k must lie in [1, beam_width]");
  }
  if (max_decode_len < 1) throw ConfigError("max_decode_len must be positive");
  if (!(length_penalty >= 0.0)) {
    throw ConfigError("length_penalty must be non-negative");
  }
}

int ScoredLength(const BeamHypothesis& h) {
  return static_cast<int>(h.ids.size()) - 1;
}

template <typename S>
std::vector<BeamHypothesis> BeamSearch(const model::Transformer<S>& net,
                                       const std::vector<int>& source,
                                       const GenerationConfig& cfg,
                                       bool allow_wide) {
  cfg.Validate(allow_wide);
  const model::ModelConfig& mc = net.params().config();
  const int max_steps = std::min(cfg.max_decode_len, mc.max_len);
  const auto width = static_cast<std::size_t>(cfg.beam_width);
  std::vector<char> banned(static_cast<std::size_t>(mc.vocab_size), 0);
  for (int id : cfg.banned_ids) {
    if (id >= 0 && id < mc.vocab_size) banned[static_cast<std::size_t>(id)] = 1;
  }

  auto memory = net.Encode(model::EncoderInput(source, mc.max_len));
  std::vector<Live<S>> live(1);
  live[0].ids = {kBosId};
  live[0].logprob = 0;
  live[0].state = net.StartDecoding(memory);
  live[0].next = net.Step(*live[0].state, kBosId);

  std::vector<BeamHypothesis> finished;
  for (int t = 1; t <= max_steps && !live.empty() && finished.size() < width;
       ++t) {
    std::vector<Candidate> cands;
    cands.reserve(live.size() * static_cast<std::size_t>(mc.vocab_size));
    for (std::size_t p = 0; p < live.size(); ++p) {
      for (int v = 0; v < mc.vocab_size; ++v) {
        if (banned[static_cast<std::size_t>(v)]) continue;
        cands.push_back({p, v,
                         live[p].logprob +
                             static_cast<double>(live[p].next[static_cast<std::size_t>(v)])});
      }
    }
    auto better = [&](const Candidate& a, const Candidate& b) {
      if (a.logprob != b.logprob) return a.logprob > b.logprob;
      return ExtendedLess(live[a.parent].ids, a.token, live[b.parent].ids,
                          b.token);
    };
    // At most `width` EOS candidates precede the point where live fills up.
    const std::size_t keep = std::min(cands.size(), 2 * width + live.size());
    std::partial_sort(cands.begin(),
                      cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), better);
    std::vector<Live<S>> next_live;
    for (std::size_t i = 0; i < keep && next_live.size() < width; ++i) {
      const Candidate& c = cands[i];
      std::vector<int> ids = live[c.parent].ids;
      ids.push_back(c.token);
      if (c.token == kEosId) {
        if (finished.size() < width) {
          finished.push_back({std::move(ids), c.logprob, 0, true});
        }
        continue;
      }
      Live<S> child;
      child.ids = std::move(ids);
      child.logprob = c.logprob;
      if (t < max_steps) {
        child.state = net.Clone(*live[c.parent].state);
        child.next = net.Step(*child.state, c.token);
      }
      next_live.push_back(std::move(child));
    }
    live = std::move(next_live);
  }

  std::vector<BeamHypothesis> out = std::move(finished);
  if (out.empty()) {
    for (auto& h : live) out.push_back({h.ids, h.logprob, 0, false});
  }
  for (auto& h : out) {
    h.normalized_score = Normalize(h.logprob, ScoredLength(h), cfg.length_penalty);
  }
  std::sort(out.begin(), out.end(),
            [](const BeamHypothesis& a, const BeamHypothesis& b) {
              if (a.normalized_score != b.normalized_score) {
                return a.normalized_score > b.normalized_score;
              }
              return a.ids < b.ids;
            });
  if (out.size() > width) out.resize(width);
  return out;
}

template <typename S>
std::vector<std::string> GenerateTopK(const model::Transformer<S>& net,
                                      const std::string& source_text,
                                      const Vocabulary& vocab,
                                      const GenerationConfig& cfg) {
  const auto source = vocab.Encode(source_text).ids;
  const auto hyps = BeamSearch(net, source, cfg);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& h : hyps) {
    if (out.size() >= static_cast<std::size_t>(cfg.k)) break;
    std::string text = NormalizeWhitespace(vocab.Decode(h.ids));
    if (seen.insert(text).second) out.push_back(std::move(text));
  }
  return out;
}

template std::vector<BeamHypothesis> BeamSearch<float>(
    const model::Transformer<float>&, const std::vector<int>&,
    const GenerationConfig&, bool);
template std::vector<BeamHypothesis> BeamSearch<double>(
    const model::Transformer<double>&, const std::vector<int>&,
    const GenerationConfig&, bool);
template std::vector<std::string> GenerateTopK<float>(
    const model::Transformer<float>&, const std::string&, const Vocabulary&,
    const GenerationConfig&);
template std::vector<std::string> GenerateTopK<double>(
    const model::Transformer<double>&, const std::string&, const Vocabulary&,
    const GenerationConfig&);

}  // namespace assertforge::generation
