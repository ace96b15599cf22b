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

#include "assertforge/evaluation.h"

#include <gtest/gtest.h>

#include <cmath>

#include "assertforge/mining.h"
#include "assertforge/random.h"
#include "json.hpp"
#include "test_util.h"

namespace assertforge::evaluation {
namespace {

TEST(NormalizeTest, WhitespaceAndSemicolon) {
  EXPECT_EQ(NormalizeAssert("  assertTrue( x );  "), "assertTrue( x )");
  EXPECT_EQ(NormalizeAssert("a;;"), "a;");
  EXPECT_EQ(BleuTokens("a  b\tc;"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(BleuTest, HandComputedExample) {
  // p1..p4 = 4/5, 3/4, 2/3, 1/2 with no brevity penalty.
  const double expected = 100.0 * std::exp((std::log(0.8) + std::log(0.75) +
                                            std::log(2.0 / 3.0) + std::log(0.5)) /
                                           4.0);
  const double got = Bleu4(BleuTokens("a b c d e"), BleuTokens("a b c d f"));
  EXPECT_NEAR(got, expected, 1e-9);
  EXPECT_NEAR(got, 66.87, 0.01);
}

TEST(BleuTest, IdentityZeroAndBrevity) {
  const auto x = BleuTokens("assertEquals ( a , b )");
  EXPECT_DOUBLE_EQ(Bleu4(x, x), 100.0);
  EXPECT_DOUBLE_EQ(CorpusBleu4({{x, x}, {x, x}}), 100.0);
  EXPECT_EQ(Bleu4(BleuTokens("p q r s"), BleuTokens("a b c d")), 0.0);
  // Short candidate: all precisions 1, BP = exp(1 - 6/4).
  EXPECT_NEAR(Bleu4(BleuTokens("a b c d"), BleuTokens("a b c d e f")),
              100.0 * std::exp(1.0 - 1.5), 1e-9);
  // Without a 4-gram match only smoothing rescues a score.
  const auto c = BleuTokens("a b c x d");
  const auto r = BleuTokens("a b c y d");
  EXPECT_EQ(Bleu4(c, r), 0.0);
  EXPECT_GT(Bleu4(c, r, /*smooth=*/true), 0.0);
  EXPECT_THROW(Bleu4(x, {}), EmptyReferenceError);
}

TEST(BleuTest, CorpusPoolsCounts) {
  const auto a = BleuTokens("a b c d e");
  const auto b = BleuTokens("a b c d f");
  const auto g = BleuTokens("g h i j k");
  // Pooled: p_n = (4+5)/10, (3+4)/8, (2+3)/6, (1+2)/4.
  const double expected =
      100.0 * std::exp((std::log(0.9) + std::log(7.0 / 8) + std::log(5.0 / 6) +
                        std::log(0.75)) / 4.0);
  EXPECT_NEAR(CorpusBleu4({{a, b}, {g, g}}), expected, 1e-9);
}

TEST(TopKTest, BruteForceOnRandomExamplesAndMonotone) {
  Rng rng(21);
  std::vector<std::vector<std::string>> cands(20);
  std::vector<std::string> targets(20);
  for (int i = 0; i < 20; ++i) {
    targets[static_cast<std::size_t>(i)] = "assertEquals(" + std::to_string(rng.Below(30)) + ", x)";
    for (int j = 0; j < 50; ++j) {
      cands[static_cast<std::size_t>(i)].push_back(
          "assertEquals(" + std::to_string(rng.Below(30)) + ", x) ");
    }
  }
  std::int64_t prev = 0;
  for (int k = 1; k <= 50; ++k) {
    std::int64_t brute = 0;
    for (int i = 0; i < 20; ++i) {
      bool hit = false;
      for (int j = 0; j < k; ++j) {
        hit |= NormalizeAssert(cands[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ==
               NormalizeAssert(targets[static_cast<std::size_t>(i)]);
      }
      brute += hit;
    }
    const TopKCount c = TopKAccuracy(cands, targets, k);
    EXPECT_EQ(c.count, brute) << k;
    EXPECT_DOUBLE_EQ(c.fraction, static_cast<double>(brute) / 20.0);
    EXPECT_GE(c.count, prev);
    prev = c.count;
  }
  EXPECT_THROW(TopKAccuracy(cands, {"x"}, 1), LengthMismatchError);
}

TEST(SyntaxTest, SampleAssertsParse) {
  for (const auto& a : testing::SampleAsserts()) EXPECT_TRUE(SyntaxCheck(a)) << a;
  EXPECT_TRUE(SyntaxCheck("assertTrue(x);"));
}

TEST(SyntaxTest, CorruptionsFail) {
  ASSERT_EQ(testing::CorruptedAsserts().size(), 10u);
  for (const auto& a : testing::CorruptedAsserts()) EXPECT_FALSE(SyntaxCheck(a)) << a;
  EXPECT_FALSE(SyntaxCheck(""));
  EXPECT_FALSE(SyntaxCheck("f(); } void g() { h()"));
  EXPECT_FALSE(SyntaxCheck("int x = 1; x++"));
}

TEST(SyntaxTest, MinedTargetsParse) {
  mining::MiningOptions opts;
  opts.src_dir = testing::FixtureDir() / "repo" / "src";
  const auto taps = mining::MineDirectory(opts).taps;
  ASSERT_FALSE(taps.empty());
  for (const auto& t : taps) EXPECT_TRUE(SyntaxCheck(t.target_text)) << t.target_text;
}

TEST(EvaluateTest, MemorizedCorpusScoresPerfectly) {
  const std::vector<std::string> targets = {"assertTrue(a == b && c)", "assertEquals(1, b.c(), d, e)"};
  const std::vector<std::vector<std::string>> cands = {
      {"assertTrue(a == b && c)", "assertFalse(a)"}, {"assertEquals(1,  b.c(), d, e);", "bad("}};
  const EvalReport r = Evaluate(cands, targets, 0.25);
  EXPECT_EQ(r.n, 2);
  EXPECT_EQ(r.topk.size(), 50u);
  EXPECT_DOUBLE_EQ(r.topk.at(1).fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.topk.at(50).fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.bleu4, 100.0);
  EXPECT_DOUBLE_EQ(r.syntax.at(1), 1.0);
  EXPECT_DOUBLE_EQ(r.syntax.at(25), 0.75);  // averaged over all candidates
  const auto j = nlohmann::json::parse(r.ToJson());
  EXPECT_EQ(j["n"], 2);
  EXPECT_DOUBLE_EQ(j["valid_loss"].get<double>(), 0.25);
  EXPECT_NE(r.ToTable().find("100.00%"), std::string::npos);
  EXPECT_THROW(Evaluate(cands, {"x"}), LengthMismatchError);
}

TEST(FormatTest, CountsAndPercents) {
  EXPECT_EQ(FormatCount(11754), "11,754");
  EXPECT_EQ(FormatCount(188154), "188,154");
  EXPECT_EQ(FormatCount(999), "999");
  EXPECT_EQ(FormatCount(1000000), "1,000,000");
  EXPECT_EQ(FormatPercent(0.624715), "62.47%");
  EXPECT_EQ(FormatPercent(1.0), "100.00%");
}

}  // namespace
}  // namespace assertforge::evaluation
