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

#include "assertforge/noising.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace assertforge::noising {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool RunIsFree(const std::vector<char>& covered, std::size_t start,
               std::size_t len) {
  for (std::size_t i = start; i < start + len; ++i) {
    if (covered[i]) return false;
  }
  return true;
}

void CheckRate(const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(v));
  }
}

}  // namespace

Mode ParseMode(const std::string& name) {
  if (name == "english") return Mode::kEnglish;
  if (name == "code") return Mode::kCode;
  throw ConfigError("unknown noising mode '" + name + "'");
}

const char* ModeName(Mode mode) {
  return mode == Mode::kEnglish ? "english" : "code";
}

void CorruptionConfig::Validate() const {
  CheckRate("mask_rate", mask_rate);
  CheckRate("delete_rate", delete_rate);
  CheckRate("rotate_fraction", rotate_fraction);
  if (!(poisson_lambda > 0.0)) {
    throw ConfigError("poisson_lambda must be positive");
  }
  if (max_len < 0) throw ConfigError("max_len must be non-negative");
}

int SampleSpanLength(const CorruptionConfig& cfg, Rng& rng) {
  return rng.Poisson(cfg.poisson_lambda);
}

std::vector<int> MaskSpans(const std::vector<int>& ids,
                           const CorruptionConfig& cfg, Rng& rng) {
  const std::size_t n = ids.size();
  if (n < 2 || cfg.mask_rate <= 0.0) return ids;
  const auto budget = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(cfg.mask_rate * n - 1e-9)));
  std::vector<char> covered(n, 0);
  std::vector<char> span_start(n, 0);
  std::vector<char> insert_before(n, 0);
  std::size_t masked = 0;
  // Zero-length draws make no progress; the guard only matters for absurd
  // lambdas where nearly every draw is zero.
  for (std::size_t guard = 0; masked < budget && guard < 100 * n + 1000;
       ++guard) {
    std::size_t len = static_cast<std::size_t>(SampleSpanLength(cfg, rng));
    if (len == 0) {
      const auto p = static_cast<std::size_t>(rng.Below(n));
      if (!covered[p]) insert_before[p] = 1;
      continue;
    }
    len = std::min(len, budget - masked);
    std::size_t start = n;
    for (int attempt = 0; attempt < 32 && start == n; ++attempt) {
      const auto s = static_cast<std::size_t>(rng.Below(n - len + 1));
      if (RunIsFree(covered, s, len)) start = s;
    }
    if (start == n) {
      // Dense region: take the first free run at or after a random offset.
      const std::size_t positions = n - len + 1;
      const auto offset = static_cast<std::size_t>(rng.Below(positions));
      for (std::size_t k = 0; k < positions && start == n; ++k) {
        const std::size_t s = (offset + k) % positions;
        if (RunIsFree(covered, s, len)) start = s;
      }
    }
    if (start == n) {
      // No run of this length is left; cover a single uncovered token.
      len = 1;
      for (std::size_t s = 0; s < n && start == n; ++s) {
        if (!covered[s]) start = s;
      }
    }
    span_start[start] = 1;
    for (std::size_t i = start; i < start + len; ++i) covered[i] = 1;
    masked += len;
  }
  std::vector<int> out;
  out.reserve(n + 8);
  for (std::size_t i = 0; i < n; ++i) {
    if (insert_before[i] && !covered[i]) out.push_back(kMaskId);
    if (!covered[i]) {
      out.push_back(ids[i]);
    } else if (span_start[i]) {
      out.push_back(kMaskId);
    }
  }
  return out;
}

std::vector<std::size_t> SentenceBoundaries(const std::vector<int>& ids,
                                            const Vocabulary& vocab) {
  std::vector<std::size_t> out;
  auto text = [&](std::size_t i) -> std::string_view {
    const int id = ids[i];
    if (Vocabulary::IsSpecial(id) || id >= vocab.size()) return {};
    return vocab.token(id);
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::string_view t = text(i);
    std::size_t end = t.size();
    while (end > 0 && IsSpace(t[end - 1])) --end;
    if (end == 0 || t[end - 1] != '.') continue;
    const bool trailing_space = end < t.size();
    const bool last = i + 1 == ids.size();
    const std::string_view next = last ? std::string_view() : text(i + 1);
    if (trailing_space || last || (!next.empty() && IsSpace(next.front()))) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> PermuteSentences(const std::vector<int>& ids,
                                  const std::vector<std::size_t>& boundaries,
                                  Rng& rng) {
  std::vector<std::vector<int>> sentences;
  std::size_t begin = 0;
  for (std::size_t b : boundaries) {
    if (b < begin || b >= ids.size()) continue;
    sentences.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                           ids.begin() + static_cast<std::ptrdiff_t>(b + 1));
    begin = b + 1;
  }
  if (begin < ids.size()) {
    sentences.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                           ids.end());
  }
  if (sentences.size() < 2) return ids;
  ShuffleInPlace(sentences, rng);
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<int> DeleteTokens(const std::vector<int>& ids,
                              const CorruptionConfig& cfg, Rng& rng) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (!rng.Bernoulli(cfg.delete_rate)) out.push_back(id);
  }
  return out;
}

std::vector<int> RotateAt(const std::vector<int>& ids, std::size_t pivot) {
  if (ids.empty()) return ids;
  pivot %= ids.size();
  std::vector<int> out(ids.begin() + static_cast<std::ptrdiff_t>(pivot),
                       ids.end());
  out.insert(out.end(), ids.begin(),
             ids.begin() + static_cast<std::ptrdiff_t>(pivot));
  return out;
}

std::vector<int> RotateDocument(const std::vector<int>& ids,
                                const CorruptionConfig& cfg, Rng& rng,
                                bool* rotated) {
  const bool rotate = rng.Bernoulli(cfg.rotate_fraction);
  if (rotated != nullptr) *rotated = rotate;
  if (!rotate || ids.empty()) return ids;
  return RotateAt(ids, static_cast<std::size_t>(rng.Below(ids.size())));
}

DenoisingPair MakeDenoisingPair(const std::vector<int>& doc,
                                const CorruptionConfig& cfg,
                                std::uint64_t doc_index,
                                const Vocabulary& vocab) {
  Rng rng(MixSeed(cfg.seed, doc_index));
  DenoisingPair pair;
  pair.target = doc;
  if (cfg.max_len > 0 && pair.target.size() > static_cast<std::size_t>(cfg.max_len)) {
    pair.target.resize(static_cast<std::size_t>(cfg.max_len));
  }
  if (cfg.mode == Mode::kEnglish) {
    pair.source = MaskSpans(pair.target, cfg, rng);
    if (cfg.permute_sentences) {
      pair.source = PermuteSentences(
          pair.source, SentenceBoundaries(pair.source, vocab), rng);
    }
  } else {
    pair.source = RotateDocument(DeleteTokens(pair.target, cfg, rng), cfg, rng);
  }
  if (cfg.max_len > 0 && pair.source.size() > static_cast<std::size_t>(cfg.max_len)) {
    pair.source.resize(static_cast<std::size_t>(cfg.max_len));
  }
  return pair;
}

std::vector<std::string> FilterDocuments(std::vector<std::string> docs,
                                         double max_non_ascii,
                                         CorpusFilterStats* stats) {
  CorpusFilterStats local;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::string> kept;
  for (std::string& doc : docs) {
    ++local.documents;
    if (NormalizeWhitespace(doc).empty()) {
      ++local.empty;
      continue;
    }
    if (!seen.insert(Fnv1a64(doc)).second) {
      ++local.duplicates;
      continue;
    }
    const auto non_ascii = static_cast<std::size_t>(std::count_if(
        doc.begin(), doc.end(),
        [](char c) { return static_cast<unsigned char>(c) >= 0x80; }));
    if (static_cast<double>(non_ascii) >
        max_non_ascii * static_cast<double>(doc.size())) {
      ++local.non_ascii;
      continue;
    }
    kept.push_back(std::move(doc));
  }
  if (stats != nullptr) *stats = local;
  return kept;
}

}  // namespace assertforge::noising
