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

#ifndef ASSERTFORGE_TESTS_TEST_UTIL_H_
#define ASSERTFORGE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "assertforge/model.h"
#include "assertforge/random.h"
#include "assertforge/textprep.h"

namespace assertforge::testing {

inline std::filesystem::path FixtureDir() { return ASSERTFORGE_FIXTURE_DIR; }

// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("assertforge_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Copy-style toy task: the target quotes two source positions between fixed
// marker ids, plus a few random trailing ids. Learnable by a small model.
inline std::vector<model::Example> CopyTask(int n, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<model::Example> out;
  for (int i = 0; i < n; ++i) {
    model::Example ex;
    const int len = 16 + static_cast<int>(rng.Below(16));
    for (int j = 0; j < len; ++j) {
      ex.source.push_back(6 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(vocab - 10))));
    }
    ex.target = {40, ex.source[2], 41, ex.source[5], 42};
    const int extra = static_cast<int>(rng.Below(4));
    for (int j = 0; j < extra; ++j) {
      ex.target.push_back(6 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(vocab - 10))));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// 1+1 layers, d_model 8, vocab 11: small enough for finite differences.
inline model::ModelConfig TinyConfig() {
  model::ModelConfig c;
  c.enc_layers = 1;
  c.dec_layers = 1;
  c.d_model = 8;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_len = 8;
  c.vocab_size = 11;
  c.dropout = 0;
  return c;
}

// Init plus noise on every entry, so biases and gains get generic gradients.
inline model::Parameters<double> GenericParams(const model::ModelConfig& c,
                                               std::uint64_t seed) {
  auto p = model::Parameters<double>::Init(c, seed);
  Rng rng(seed + 1000);
  for (auto& t : p.tensors()) {
    for (double& v : t.data) v += rng.Normal(0, 0.1);
  }
  return p;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-6) over all
// parameters, with central differences of step h on the mean batch loss.
inline double MaxRelativeGradError(model::Parameters<double> p,
                                   const std::vector<model::Example>& batch,
                                   double h = 1e-4) {
  model::Parameters<double> g(p.config());
  model::BatchGradient(p, batch, &g);
  double worst = 0;
  for (std::size_t ti = 0; ti < p.tensors().size(); ++ti) {
    auto& data = p.tensors()[ti].data;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double orig = data[j];
      data[j] = orig + h;
      const double up = model::MeanLoss(p, batch);
      data[j] = orig - h;
      const double down = model::MeanLoss(p, batch);
      data[j] = orig;
      const double numeric = (up - down) / (2 * h);
      const double analytic = g.tensors()[ti].data[j];
      const double den = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
      worst = std::max(worst, std::fabs(numeric - analytic) / den);
    }
  }
  return worst;
}

inline std::vector<model::Example> TinyBatch() {
  return {{{6, 7, 8, 9}, {7, 8, 10}}, {{10, 9, 6}, {6, 6}}};
}

// Sample developer and model asserts: the BitSet pair, common and complex
// forms, equivalent target/prediction pairs, and two longer examples.
inline const std::vector<std::string>& SampleAsserts() {
  static const std::vector<std::string> kAsserts = {
      "Assert.assertEquals(bset.length(), ibset.length())",
      "assertEquals(expected, result)",
      "assertSame(rows, actual)",
      "assertNotNull(client)",
      "assertTrue(list.contains(element))",
      "assertArrayEquals(expected, values)",
      "assertEquals(1, result.getSize())",
      "assertEquals(0, zero.getPartialDerivative(n), epsilon [ n ])",
      "assertThat(emptySession.getEnd(), CoreMatchers.equalTo(date))",
      "assertEquals(container.getSoundEffects().read(0), Sound.ENTITY_CAT_HISS)",
      "assertNull(sm.get(serviceStub.getClass()))",
      "assertNull(sm.get(AbstractService.class))",
      "assertTrue( status == 0)",
      "assertEquals(0, status)",
      "assertEquals(user.getSNetVisibility(), visibility)",
      "assertEquals(visibility, user.getSNetVisibility())",
      "assertTrue( ps1 == ps2)",
      "assertSame(ps1, ps2)",
      "Assert.assertTrue( event instanceof BeginNwhinInvocationEvent)",
      "Assert.assertTrue(lru.exists( 100 + i))",
  };
  return kAsserts;
}

// Hand-corrupted variants of the sample asserts; none is one statement.
inline const std::vector<std::string>& CorruptedAsserts() {
  static const std::vector<std::string> kCorrupted = {
      "Assert.assertEquals(bset.length(), ibset.length()",
      "assertEquals(expected, result))",
      "assertSame(rows actual)",
      "assertNotNull(client",
      "assertTrue(list.contains(element)",
      "assertArrayEquals(expected, , values)",
      "assertEquals(1, result.getSize()) assertTrue(x)",
      "assertThat(emptySession.getEnd(), CoreMatchers.equalTo(date)); }",
      "assertTrue( status == )",
      "Assert.assertTrue( event instanceof )",
  };
  return kCorrupted;
}

// Expected augmentation rows: (EvoSuite test method, generated assert) in
// file order. test11 (createBigDecimal) has no usable assert and is absent.
inline const std::vector<std::pair<std::string, std::string>>& EvoSuiteAsserts() {
  static const std::vector<std::pair<std::string, std::string>> kAsserts = {
      {"test00", "assertEquals(5, NumberUtils.toInt(\"5\"))"},
      {"test01", "assertEquals(1, NumberUtils.toLong(\"1\", 1))"},
      {"test02", "assertEquals(6, NumberUtils.toFloat(\"6\", 6), 0);"},
      {"test03", "assertNotNull(NumberUtils.toDouble(\"foo\", 1.0));"},
      {"test04", "assertEquals(1, NumberUtils.toByte(\"1\",(( byte)(1))));"},
      {"test05", "assertEquals(15, NumberUtils.toShort(\"15\",(( short)(15))));"},
      {"test06", "assertNotNull(NumberUtils.createFloat(\"1\"))"},
      {"test07", "assertNotNull(NumberUtils.createDouble(\"1\"));"},
      {"test08", "assertNotNull(NumberUtils.createInteger(\"1\"));"},
      {"test09", "assertNotNull(NumberUtils.createLong(\"1\"));"},
      {"test10", "assertEquals(BigInteger.valueOf(1), NumberUtils.createBigInteger(\"1\"));"},
      {"test12", "assertNotNull(long0);"},
      {"test13", "assertEquals(4, NumberUtils.min(4, 5, 7));"},
      {"test14", "assertTrue(( float0 == 0.0F));"},
      {"test15", "assertTrue(( byte0 == 5));"},
      {"test16", "assertTrue(NumberUtils.isDigits(\"1\"));"},
      {"test17", "assertTrue(NumberUtils.isNumber(\"1\"))"},
  };
  return kAsserts;
}

inline std::filesystem::path EvoSuiteTestFile() {
  return FixtureDir() / "evosuite" / "tests" / "org" / "apache" / "commons" /
         "lang3" / "math" / "NumberUtils_ESTest.java";
}

// Every output of at most `max_tokens` tokens that ends in EOS, scored by
// exact sequence log-probability from full forward passes. Sorted best first,
// ties by token order, as beam search reports them at length penalty 0.
struct ScoredSequence {
  std::vector<int> ids;  // BOS ... EOS
  double logprob;
};

inline std::vector<ScoredSequence> EnumerateOutputs(
    const model::Transformer<double>& net, const std::vector<int>& source,
    int max_tokens) {
  const int vocab = net.params().config().vocab_size;
  const auto enc = model::EncoderInput(source, net.params().config().max_len);
  std::vector<ScoredSequence> out;
  std::vector<std::vector<int>> prefixes = {{kBosId}};
  for (int len = 1; len <= max_tokens; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : prefixes) {
      for (int v = 0; v < vocab; ++v) {
        std::vector<int> ids = prefix;
        ids.push_back(v);
        if (v != kEosId) {
          next.push_back(std::move(ids));
          continue;
        }
        // One full forward over the decoder input, summing each row's
        // log-softmax at the following token.
        const auto logits = net.Logits(enc, prefix);
        double lp = 0;
        for (int t = 0; t < logits.rows; ++t) {
          double mx = -1e300, z = 0;
          for (int u = 0; u < vocab; ++u) mx = std::max(mx, logits(t, u));
          for (int u = 0; u < vocab; ++u) z += std::exp(logits(t, u) - mx);
          lp += logits(t, ids[static_cast<std::size_t>(t) + 1]) - mx - std::log(z);
        }
        out.push_back({ids, lp});
      }
    }
    prefixes = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const ScoredSequence& a, const ScoredSequence& b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.ids < b.ids;
  });
  return out;
}

}  // namespace assertforge::testing

#endif  // ASSERTFORGE_TESTS_TEST_UTIL_H_
