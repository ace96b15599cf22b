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

#include "assertforge/model.h"

#include <gtest/gtest.h>

#include <cmath>

#include "assertforge/common.h"
#include "test_util.h"

namespace assertforge::model {
namespace {

using testing::GenericParams;
using testing::TinyBatch;
using testing::TinyConfig;

TEST(ModelConfigTest, ValidationAndMapRoundTrip) {
  ModelConfig c = TinyConfig();
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(ModelConfig::FromMap(c.ToMap()), c);
  c.n_heads = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TinyConfig();
  c.dropout = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TinyConfig();
  c.vocab_size = 5;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(FramingTest, BosEosAndTruncation) {
  EXPECT_EQ(EncoderInput({7, 8}, 10), (std::vector<int>{7, 8, kEosId}));
  EXPECT_EQ(DecoderInput({7, 8}, 10), (std::vector<int>{kBosId, 7, 8}));
  EXPECT_EQ(DecoderLabels({7, 8}, 10), (std::vector<int>{7, 8, kEosId}));
  EXPECT_EQ(EncoderInput({7, 8, 9, 10}, 3).size(), 3u);
  EXPECT_EQ(DecoderInput({7, 8, 9, 10}, 3).size(), DecoderLabels({7, 8, 9, 10}, 3).size());
}

TEST(GradientTest, MatchesCentralDifferences) {
  const double err = testing::MaxRelativeGradError(GenericParams(TinyConfig(), 7), TinyBatch());
  EXPECT_LT(err, 1e-3);
}

TEST(GradientTest, UnusedVocabularyRowsGetZeroGradient) {
  // With untied embeddings, rows of ids never fed to either side stay zero.
  ModelConfig c = TinyConfig();
  c.tie_embeddings = false;
  const auto p = GenericParams(c, 2);
  Parameters<double> g(c);
  BatchGradient(p, {{{6, 7}, {7}}}, &g);
  const auto& enc = g.at("embed.enc_token");
  for (int id = 0; id < c.vocab_size; ++id) {
    if (id == 6 || id == 7 || id == kEosId) continue;
    for (int k = 0; k < c.d_model; ++k) {
      EXPECT_EQ(enc.data[static_cast<std::size_t>(id * c.d_model + k)], 0.0) << id;
    }
  }
}

TEST(GradientTest, TiedGradientIsSumOfTiePoints) {
  const auto tied = GenericParams(TinyConfig(), 4);
  const auto untied = Untie(tied);
  Parameters<double> gt(tied.config()), gu(untied.config());
  const double lt = BatchGradient(tied, TinyBatch(), &gt);
  const double lu = BatchGradient(untied, TinyBatch(), &gu);
  EXPECT_NEAR(lt, lu, 1e-12);
  const auto& a = gu.at("embed.enc_token").data;
  const auto& b = gu.at("embed.dec_token").data;
  const auto& o = gu.at("out.proj").data;
  const auto& t = gt.at("embed.token").data;
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(t[i], a[i] + b[i] + o[i], 1e-12);
  }
}

TEST(GradientTest, OneStepDescends) {
  auto p = GenericParams(TinyConfig(), 5);
  Parameters<double> g(p.config());
  const double before = BatchGradient(p, TinyBatch(), &g);
  for (std::size_t i = 0; i < p.tensors().size(); ++i) {
    for (std::size_t j = 0; j < p.tensors()[i].data.size(); ++j) {
      p.tensors()[i].data[j] -= 1e-3 * g.tensors()[i].data[j];
    }
  }
  EXPECT_LT(MeanLoss(p, TinyBatch()), before);
}

TEST(TransformerTest, IncrementalDecodingMatchesFullForward) {
  const auto p = GenericParams(TinyConfig(), 8);
  Transformer<double> net(p);
  const std::vector<int> enc = {6, 7, 8, kEosId};
  const std::vector<int> dec = {kBosId, 7, 8, 10};
  const auto logits = net.Logits(enc, dec);
  auto state = net.StartDecoding(net.Encode(enc));
  for (int t = 0; t < 4; ++t) {
    const auto lp = net.Step(*state, dec[static_cast<std::size_t>(t)]);
    double mx = -1e300, z = 0;
    for (int v = 0; v < 11; ++v) mx = std::max(mx, logits(t, v));
    for (int v = 0; v < 11; ++v) z += std::exp(logits(t, v) - mx);
    for (int v = 0; v < 11; ++v) {
      EXPECT_NEAR(lp[static_cast<std::size_t>(v)], logits(t, v) - mx - std::log(z), 1e-10);
    }
  }
  EXPECT_EQ(net.Position(*state), 4);
}

TEST(TransformerTest, ClonedStatesEvolveIndependently) {
  const auto p = GenericParams(TinyConfig(), 9);
  Transformer<double> net(p);
  auto a = net.StartDecoding(net.Encode({6, kEosId}));
  net.Step(*a, kBosId);
  auto b = net.Clone(*a);
  const auto la = net.Step(*a, 7);
  net.Step(*b, 8);
  auto c = net.StartDecoding(net.Encode({6, kEosId}));
  net.Step(*c, kBosId);
  EXPECT_EQ(net.Step(*c, 7), la);
}

TEST(TransformerTest, ShapeErrors) {
  const auto p = GenericParams(TinyConfig(), 1);
  Transformer<double> net(p);
  EXPECT_THROW(net.Logits({6, 11}, {kBosId}), ShapeError);
  EXPECT_THROW(net.Logits({6}, std::vector<int>(9, 6)), ShapeError);
  EXPECT_THROW(net.Logits({}, {kBosId}), ShapeError);
}

TEST(TransformerTest, BatchForwardIgnoresPadding) {
  const auto p = GenericParams(TinyConfig(), 3);
  Transformer<double> net(p);
  const std::vector<std::vector<int>> src = {{6, 7, kEosId}, {8, kEosId, kPadId}};
  const std::vector<std::vector<int>> tgt = {{kBosId, 9}, {kBosId, kPadId}};
  const auto flat = ForwardBatch(p, src, tgt);
  ASSERT_EQ(flat.size(), 2u * 2u * 11u);
  const auto single = net.Logits({8, kEosId}, {kBosId});
  for (int v = 0; v < 11; ++v) {
    EXPECT_NEAR(flat[static_cast<std::size_t>(2 * 11 + v)], single(0, v), 1e-12);
    EXPECT_EQ(flat[static_cast<std::size_t>(3 * 11 + v)], 0.0);
  }
}

TEST(TransformerTest, DropoutChangesLossOnlyWhenEnabled) {
  ModelConfig c = TinyConfig();
  c.dropout = 0.3;
  const auto p = GenericParams(c, 6);
  Transformer<double> net(p);
  const auto enc = EncoderInput({6, 7, 8}, 8);
  const auto dec = DecoderInput({7, 9}, 8);
  const auto lab = DecoderLabels({7, 9}, 8);
  const double plain = net.LossAndGradient(enc, dec, lab, nullptr, 1.0, nullptr);
  Rng r1(1), r2(1);
  const double d1 = net.LossAndGradient(enc, dec, lab, nullptr, 1.0, &r1);
  const double d2 = net.LossAndGradient(enc, dec, lab, nullptr, 1.0, &r2);
  EXPECT_EQ(d1, d2);
  EXPECT_NE(d1, plain);
}

TEST(ParametersTest, InitAndCast) {
  const auto p = Parameters<double>::Init(TinyConfig(), 1);
  EXPECT_TRUE(p.AllFinite());
  EXPECT_EQ(p.Index("nope"), -1);
  EXPECT_THROW(p.at("nope"), ShapeError);
  const auto f = p.Cast<float>();
  EXPECT_EQ(f.NumScalars(), p.NumScalars());
  EXPECT_EQ(Parameters<double>::Init(TinyConfig(), 1).tensors()[0].data,
            p.tensors()[0].data);
}

TEST(LossTest, MeanCrossEntropyUniformLogits) {
  Matrix<double> m{2, 4, std::vector<double>(8, 0.0)};
  EXPECT_NEAR(MeanCrossEntropy(m, {1, 3}), std::log(4.0), 1e-12);
  EXPECT_NEAR(MeanCrossEntropy(m, {1, kPadId}), std::log(4.0), 1e-12);
  EXPECT_THROW(MeanCrossEntropy(m, {kPadId, kPadId}), ShapeError);
}

}  // namespace
}  // namespace assertforge::model
