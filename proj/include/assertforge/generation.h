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

#ifndef ASSERTFORGE_GENERATION_H_
#define ASSERTFORGE_GENERATION_H_

#include <string>
#include <vector>

#include "assertforge/model.h"
#include "assertforge/textprep.h"

namespace assertforge::generation {

inline constexpr int kMaxBeamWidth = 50;

struct GenerationConfig {
  int beam_width = 10;
  int k = 10;
  int max_decode_len = 64;  // generated tokens, EOS included
  double length_penalty = 0.6;
  // Never proposed during decoding. The enumeration oracle clears this.
  std::vector<int> banned_ids = {kPadId, kBosId, kMaskId, kPlaceholderId};

  // 1 <= k <= beam_width <= kMaxBeamWidth unless `allow_wide` is set, which
  // only the exhaustive test harness uses.
  void Validate(bool allow_wide = false) const;
};

struct BeamHypothesis {
  std::vector<int> ids;  // BOS ... EOS (no EOS when unfinished)
  double logprob = 0;
  double normalized_score = 0;
  bool finished = true;
};

// Length used by the penalty: generated tokens, EOS included, BOS excluded.
int ScoredLength(const BeamHypothesis& h);

// Returns at most beam_width hypotheses sorted by normalized score, ties by
// lexicographic token order. When nothing emits EOS in time, the best
// unfinished hypotheses come back with finished = false.
template <typename S>
std::vector<BeamHypothesis> BeamSearch(const model::Transformer<S>& net,
                                       const std::vector<int>& source,
                                       const GenerationConfig& cfg,
                                       bool allow_wide = false);

// Decoded, whitespace-normalized candidates, best first, duplicates removed,
// at most cfg.k of them.
template <typename S>
std::vector<std::string> GenerateTopK(const model::Transformer<S>& net,
                                      const std::string& source_text,
                                      const Vocabulary& vocab,
                                      const GenerationConfig& cfg);

}  // namespace assertforge::generation

#endif  // ASSERTFORGE_GENERATION_H_
