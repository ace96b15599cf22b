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

#include "assertforge/common.h"

#include <gtest/gtest.h>

#include <set>

#include "assertforge/random.h"
#include "test_util.h"

namespace assertforge {
namespace {

TEST(NormalizeWhitespaceTest, CollapsesRunsAndTrims) {
  EXPECT_EQ(NormalizeWhitespace("  a \t\n b  "), "a b");
  EXPECT_EQ(NormalizeWhitespace(""), "");
  EXPECT_EQ(NormalizeWhitespace(" \n "), "");
}

TEST(DigestTest, StableAndSensitive) {
  EXPECT_EQ(DigestHex("abc"), DigestHex("abc"));
  EXPECT_NE(DigestHex("abc"), DigestHex("abd"));
  EXPECT_EQ(DigestHex("").size(), 16u);
  // FNV-1a 64 reference value for the empty string is the offset basis.
  EXPECT_EQ(DigestHex(""), "cbf29ce484222325");
}

TEST(MixSeedTest, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(MixSeed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Utf8Test, AcceptsValidRejectsBroken) {
  EXPECT_TRUE(IsValidUtf8("plain"));
  EXPECT_TRUE(IsValidUtf8("caf\xc3\xa9"));
  EXPECT_TRUE(IsValidUtf8("\xf0\x9f\x98\x80"));
  EXPECT_FALSE(IsValidUtf8("\xc3"));
  EXPECT_FALSE(IsValidUtf8("\xc0\xaf"));        // overlong
  EXPECT_FALSE(IsValidUtf8("\xed\xa0\x80"));    // surrogate
  EXPECT_FALSE(IsValidUtf8("\xff"));
}

TEST(RngTest, ReproducibleAndInRange) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.Below(10);
    EXPECT_EQ(x, b.Below(10));
    EXPECT_LT(x, 10u);
  }
  Rng c(1);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += c.Poisson(3.0);
  EXPECT_NEAR(sum / n, 3.0, 0.05);
}

TEST(FileTest, RoundTripAndMissing) {
  testing::TempDir dir("common");
  const auto path = dir.path() / "nested" / "f.txt";
  WriteFile(path, std::string("x\0y", 3));
  EXPECT_EQ(ReadFile(path), std::string("x\0y", 3));
  EXPECT_THROW(ReadFile(dir.path() / "missing"), IoError);
}

}  // namespace
}  // namespace assertforge
