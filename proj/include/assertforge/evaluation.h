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

#ifndef ASSERTFORGE_EVALUATION_H_
#define ASSERTFORGE_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "assertforge/common.h"

namespace assertforge::evaluation {

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyReferenceError : public Error {
 public:
  using Error::Error;
};

// Collapses whitespace and drops one trailing semicolon. Exact match and
// BLEU tokenization both start from this form.
std::string NormalizeAssert(std::string_view text);

// Whitespace tokens of NormalizeAssert(text).
std::vector<std::string> BleuTokens(std::string_view text);

struct TopKCount {
  std::int64_t count = 0;
  double fraction = 0;
};

// Examples whose normalized target equals one of the first k normalized
// candidates.
TopKCount TopKAccuracy(const std::vector<std::vector<std::string>>& candidates,
                       const std::vector<std::string>& targets, int k);

// Sentence BLEU4 in [0, 100]. `smooth` applies add-one to the 2..4-gram
// precisions; without it any empty precision gives 0.
double Bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference, bool smooth = false);

// Corpus BLEU4 with pooled n-gram counts and no smoothing.
double CorpusBleu4(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs);

// True iff `class C { void m() { <text>; } }` parses and the method body
// holds exactly one statement.
bool SyntaxCheck(std::string_view text);

struct EvalReport {
  std::int64_t n = 0;
  std::map<int, TopKCount> topk;  // k = 1..max_k
  double bleu4 = 0;               // corpus BLEU4 of rank-1 candidates
  std::map<int, double> syntax;   // depth -> valid fraction of candidates
  std::optional<double> valid_loss;

  std::string ToJson() const;
  // Plain-text rendering shaped like the accuracy and metric tables.
  std::string ToTable() const;
};

inline constexpr int kMaxK = 50;
inline constexpr int kSyntaxDepths[] = {1, 25, 50};

EvalReport Evaluate(const std::vector<std::vector<std::string>>& candidates,
                    const std::vector<std::string>& targets,
                    std::optional<double> valid_loss = std::nullopt,
                    int max_k = kMaxK);

// "11,754"
std::string FormatCount(std::int64_t n);
// 0.624715 -> "62.47%"
std::string FormatPercent(double fraction);

}  // namespace assertforge::evaluation

#endif  // ASSERTFORGE_EVALUATION_H_
