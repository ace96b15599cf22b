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

#include <gtest/gtest.h>

#include <algorithm>

#include "assertforge/common.h"

namespace assertforge::noising {
namespace {

std::vector<int> Iota(int n, int start = 10) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = start + i;
  return v;
}

bool IsSubsequence(const std::vector<int>& sub, const std::vector<int>& seq) {
  std::size_t j = 0;
  for (int x : seq) {
    if (j < sub.size() && sub[j] == x) ++j;
  }
  return j == sub.size();
}

bool IsRotation(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> doubled = b;
  doubled.insert(doubled.end(), b.begin(), b.end());
  return a.empty() ||
         std::search(doubled.begin(), doubled.end(), a.begin(), a.end()) != doubled.end();
}

TEST(ConfigTest, Validation) {
  CorruptionConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.mask_rate = 1.5;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = CorruptionConfig{};
  cfg.poisson_lambda = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  EXPECT_EQ(ParseMode("code"), Mode::kCode);
  EXPECT_THROW(ParseMode("klingon"), ConfigError);
}

TEST(MaskSpansTest, ZeroRateAndShortInputsAreIdentity) {
  CorruptionConfig cfg;
  Rng rng(1);
  cfg.mask_rate = 0;
  EXPECT_EQ(MaskSpans(Iota(20), cfg, rng), Iota(20));
  cfg.mask_rate = 0.3;
  EXPECT_EQ(MaskSpans(Iota(1), cfg, rng), Iota(1));
  EXPECT_TRUE(MaskSpans({}, cfg, rng).empty());
}

TEST(MaskSpansTest, BudgetAndStructure) {
  CorruptionConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto in = Iota(200);
    const auto out = MaskSpans(in, cfg, rng);
    std::vector<int> kept;
    for (int id : out) {
      if (id != kMaskId) kept.push_back(id);
    }
    EXPECT_TRUE(IsSubsequence(kept, in));
    EXPECT_EQ(in.size() - kept.size(), 60u);  // ceil(0.3 * 200), met exactly
  }
}

TEST(MaskSpansTest, CoveredFractionOverLargeStream) {
  CorruptionConfig cfg;
  Rng rng(123);
  std::size_t total = 0, covered = 0;
  while (total < 100000) {
    const auto in = Iota(97);
    const auto out = MaskSpans(in, cfg, rng);
    std::size_t kept = 0;
    for (int id : out) kept += id != kMaskId;
    total += in.size();
    covered += in.size() - kept;
  }
  const double frac = static_cast<double>(covered) / static_cast<double>(total);
  EXPECT_GE(frac, 0.29);
  EXPECT_LE(frac, 0.31);
}

TEST(SpanLengthTest, PoissonMean) {
  CorruptionConfig cfg;
  Rng rng(5);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += SampleSpanLength(cfg, rng);
  EXPECT_GE(sum / n, 2.9);
  EXPECT_LE(sum / n, 3.1);
}

TEST(PermuteTest, PreservesSentenceMultiset) {
  const Vocabulary v;
  const auto ids = v.Encode("A. B. C. D").ids;
  const auto bounds = SentenceBoundaries(ids, v);
  EXPECT_EQ(bounds.size(), 3u);
  Rng rng(3);
  const auto out = PermuteSentences(ids, bounds, rng);
  auto a = ids, b = out;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  Rng rng2(4);
  EXPECT_EQ(PermuteSentences(Iota(5), {}, rng2), Iota(5));
  EXPECT_TRUE(PermuteSentences({}, {}, rng2).empty());
}

TEST(DeleteTest, EdgesAndRate) {
  CorruptionConfig cfg;
  Rng rng(9);
  cfg.delete_rate = 0;
  EXPECT_EQ(DeleteTokens(Iota(30), cfg, rng), Iota(30));
  cfg.delete_rate = 1;
  EXPECT_TRUE(DeleteTokens(Iota(30), cfg, rng).empty());
  cfg.delete_rate = 0.2;
  const auto in = Iota(100000, 6);
  const auto out = DeleteTokens(in, cfg, rng);
  EXPECT_TRUE(IsSubsequence(out, in));
  const double frac = static_cast<double>(out.size()) / static_cast<double>(in.size());
  EXPECT_GE(frac, 0.79);
  EXPECT_LE(frac, 0.81);
}

TEST(RotateTest, DefinitionAndRate) {
  EXPECT_EQ(RotateAt({1, 2, 3, 4}, 2), (std::vector<int>{3, 4, 1, 2}));
  EXPECT_EQ(RotateAt({1, 2, 3, 4}, 0), (std::vector<int>{1, 2, 3, 4}));
  CorruptionConfig cfg;
  Rng rng(11);
  int rotated = 0;
  const int docs = 10000;
  for (int i = 0; i < docs; ++i) {
    bool r = false;
    const auto out = RotateDocument(Iota(8), cfg, rng, &r);
    EXPECT_TRUE(IsRotation(out, Iota(8)));
    rotated += r;
  }
  const double frac = static_cast<double>(rotated) / docs;
  EXPECT_GE(frac, 0.48);
  EXPECT_LE(frac, 0.52);
}

TEST(DenoisingPairTest, ZeroRatesGiveIdentity) {
  const Vocabulary v;
  CorruptionConfig cfg;
  cfg.mask_rate = 0;
  cfg.permute_sentences = false;
  const auto doc = v.Encode("One. Two.").ids;
  EXPECT_EQ(MakeDenoisingPair(doc, cfg, 0, v).source, doc);
  cfg.mode = Mode::kCode;
  cfg.delete_rate = 0;
  cfg.rotate_fraction = 0;
  EXPECT_EQ(MakeDenoisingPair(doc, cfg, 0, v).source, doc);
}

TEST(DenoisingPairTest, CodeModeSourceIsSubsequenceOfRotation) {
  const Vocabulary v;
  const auto doc = v.Encode("public int length() { return this.bitSet.length(); }").ids;
  CorruptionConfig cfg;
  cfg.mode = Mode::kCode;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto pair = MakeDenoisingPair(doc, cfg, i, v);
    EXPECT_EQ(pair.target, doc);
    bool ok = false;
    for (std::size_t p = 0; p < doc.size() && !ok; ++p) {
      ok = IsSubsequence(pair.source, RotateAt(doc, p));
    }
    EXPECT_TRUE(ok);
  }
}

TEST(DenoisingPairTest, EnglishModeAndDeterminism) {
  const Vocabulary v;
  const auto doc = v.Encode("The cat sat on the mat. A dog barked twice.").ids;
  CorruptionConfig cfg;
  cfg.seed = 17;
  const auto a = MakeDenoisingPair(doc, cfg, 3, v);
  const auto b = MakeDenoisingPair(doc, cfg, 3, v);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.target, doc);
  EXPECT_NE(a.source, doc);
  cfg.max_len = 10;
  EXPECT_EQ(MakeDenoisingPair(doc, cfg, 3, v).target.size(), 10u);
}

TEST(FilterTest, DeduplicatesAndDropsNonAscii) {
  CorpusFilterStats stats;
  const auto kept = FilterDocuments(
      {"a", "b", "a", "\xc3\xa9\xc3\xa9\xc3\xa9x", "", "b"}, 0.1, &stats);
  EXPECT_EQ(kept, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(stats.duplicates, 2u);
  EXPECT_EQ(stats.non_ascii, 1u);
  EXPECT_EQ(stats.empty, 1u);
}

}  // namespace
}  // namespace assertforge::noising
