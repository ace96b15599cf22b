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

#ifndef ASSERTFORGE_NOISING_H_
#define ASSERTFORGE_NOISING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "assertforge/random.h"
#include "assertforge/textprep.h"

namespace assertforge::noising {

enum class Mode { kEnglish, kCode };

Mode ParseMode(const std::string& name);
const char* ModeName(Mode mode);

struct CorruptionConfig {
  Mode mode = Mode::kEnglish;
  double mask_rate = 0.30;
  double poisson_lambda = 3.0;
  double delete_rate = 0.20;
  double rotate_fraction = 0.50;
  bool permute_sentences = true;
  std::uint64_t seed = 0;
  int max_len = 0;  // 0 keeps documents whole

  // Throws ConfigError when a rate is outside [0, 1] or lambda <= 0.
  void Validate() const;
};

// Span masking. Draws span lengths L ~ Poisson(lambda) until
// ceil(mask_rate * n) tokens are covered: L = 0 inserts one MASK before an
// uncovered token, L >= 1 replaces L contiguous uncovered tokens by one MASK.
// The last span is shortened so the budget is met exactly.
std::vector<int> MaskSpans(const std::vector<int>& ids,
                           const CorruptionConfig& cfg, Rng& rng);

int SampleSpanLength(const CorruptionConfig& cfg, Rng& rng);

// Indices of sentence-final tokens: the token text ends in '.' and is
// followed by whitespace or the end of the sequence.
std::vector<std::size_t> SentenceBoundaries(const std::vector<int>& ids,
                                            const Vocabulary& vocab);

// Cuts after every boundary (the tail is a sentence too) and reorders the
// sentences with a uniform permutation.
std::vector<int> PermuteSentences(const std::vector<int>& ids,
                                  const std::vector<std::size_t>& boundaries,
                                  Rng& rng);

std::vector<int> DeleteTokens(const std::vector<int>& ids,
                              const CorruptionConfig& cfg, Rng& rng);

// ids[pivot..] + ids[..pivot].
std::vector<int> RotateAt(const std::vector<int>& ids, std::size_t pivot);

// Rotates with probability rotate_fraction at a uniform pivot. `rotated`
// reports whether a rotation was drawn.
std::vector<int> RotateDocument(const std::vector<int>& ids,
                                const CorruptionConfig& cfg, Rng& rng,
                                bool* rotated = nullptr);

struct DenoisingPair {
  std::vector<int> source;
  std::vector<int> target;
};

// target is the (truncated) document; source is its corruption: english mode
// masks then permutes sentences, code mode deletes then rotates. The random
// stream is derived from (cfg.seed, doc_index).
DenoisingPair MakeDenoisingPair(const std::vector<int>& doc,
                                const CorruptionConfig& cfg,
                                std::uint64_t doc_index,
                                const Vocabulary& vocab);

struct CorpusFilterStats {
  std::size_t documents = 0;
  std::size_t duplicates = 0;
  std::size_t non_ascii = 0;
  std::size_t empty = 0;
};

// File-level deduplication by content hash plus a filter dropping documents
// whose non-ASCII byte fraction exceeds `max_non_ascii`. Keeps first
// occurrences in input order.
std::vector<std::string> FilterDocuments(std::vector<std::string> docs,
                                         double max_non_ascii,
                                         CorpusFilterStats* stats = nullptr);

}  // namespace assertforge::noising

#endif  // ASSERTFORGE_NOISING_H_
