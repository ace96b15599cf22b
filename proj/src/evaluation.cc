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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "assertforge/java/syntax.h"
#include "json.hpp"

namespace assertforge::evaluation {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts Ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

// Clipped matches and candidate n-gram total for one order.
std::pair<std::int64_t, std::int64_t> Matches(
    const std::vector<std::string>& cand, const std::vector<std::string>& ref,
    std::size_t n) {
  const NgramCounts c = Ngrams(cand, n);
  const NgramCounts r = Ngrams(ref, n);
  std::int64_t hit = 0, total = 0;
  for (const auto& [gram, count] : c) {
    total += count;
    auto it = r.find(gram);
    if (it != r.end()) hit += std::min(count, it->second);
  }
  return {hit, total};
}

double Combine(const double precisions[4], double cand_len, double ref_len) {
  double log_sum = 0;
  for (int i = 0; i < 4; ++i) {
    if (precisions[i] <= 0) return 0;
    log_sum += std::log(precisions[i]);
  }
  const double bp =
      cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

}  // namespace

std::string NormalizeAssert(std::string_view text) {
  std::string s = NormalizeWhitespace(text);
  if (!s.empty() && s.back() == ';') {
    s.pop_back();
    s = NormalizeWhitespace(s);
  }
  return s;
}

std::vector<std::string> BleuTokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in(NormalizeAssert(text));
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

TopKCount TopKAccuracy(const std::vector<std::vector<std::string>>& candidates,
                       const std::vector<std::string>& targets, int k) {
  if (candidates.size() != targets.size()) {
    throw LengthMismatchError("candidates and targets differ in length: " +
                              std::to_string(candidates.size()) + " vs " +
                              std::to_string(targets.size()));
  }
  TopKCount out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string want = NormalizeAssert(targets[i]);
    const std::size_t depth =
        std::min(candidates[i].size(), static_cast<std::size_t>(std::max(k, 0)));
    for (std::size_t j = 0; j < depth; ++j) {
      if (NormalizeAssert(candidates[i][j]) == want) {
        ++out.count;
        break;
      }
    }
  }
  if (!targets.empty()) {
    out.fraction = static_cast<double>(out.count) / static_cast<double>(targets.size());
  }
  return out;
}

double Bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference, bool smooth) {
  if (reference.empty()) throw EmptyReferenceError("empty BLEU reference");
  if (candidate.empty()) return 0;
  double p[4];
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto [hit, total] = Matches(candidate, reference, n);
    if (smooth && n > 1) {
      p[n - 1] = static_cast<double>(hit + 1) / static_cast<double>(total + 1);
    } else {
      p[n - 1] = total == 0 ? 0 : static_cast<double>(hit) / static_cast<double>(total);
    }
  }
  return Combine(p, static_cast<double>(candidate.size()),
                 static_cast<double>(reference.size()));
}

double CorpusBleu4(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs) {
  std::int64_t hit[4] = {0, 0, 0, 0};
  std::int64_t total[4] = {0, 0, 0, 0};
  double cand_len = 0, ref_len = 0;
  for (const auto& [cand, ref] : pairs) {
    if (ref.empty()) throw EmptyReferenceError("empty BLEU reference");
    cand_len += static_cast<double>(cand.size());
    ref_len += static_cast<double>(ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto [h, t] = Matches(cand, ref, n);
      hit[n - 1] += h;
      total[n - 1] += t;
    }
  }
  if (cand_len == 0) return 0;
  double p[4];
  for (int i = 0; i < 4; ++i) {
    p[i] = total[i] == 0 ? 0 : static_cast<double>(hit[i]) / static_cast<double>(total[i]);
  }
  return Combine(p, cand_len, ref_len);
}

bool SyntaxCheck(std::string_view text) {
  // A single trailing ';' is optional; the scaffold supplies its own.
  std::string body(text);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) {
    body.pop_back();
  }
  if (!body.empty() && body.back() == ';') body.pop_back();
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return false;
  const std::string source = "class C { void m() { " + body + "; } }";
  java::SyntaxTree tree;
  try {
    tree = java::ParseCompilationUnit(source);
  } catch (const Error&) {
    return false;
  }
  // The scaffold must come back unchanged: one type, one method, one
  // statement. Text such as "f(); } void g() { h()" parses but escapes it.
  const auto& root = tree.node(tree.root());
  if (root.children.size() != 1) return false;
  const auto& type = tree.node(root.children[0]);
  if (type.kind != java::NodeKind::kTypeDecl || type.children.size() != 1) {
    return false;
  }
  const auto& method = tree.node(type.children[0]);
  if (method.kind != java::NodeKind::kMethod || method.name != "m") return false;
  for (int c : method.children) {
    const auto& child = tree.node(c);
    if (child.kind == java::NodeKind::kBlock) return child.children.size() == 1;
  }
  return false;
}

EvalReport Evaluate(const std::vector<std::vector<std::string>>& candidates,
                    const std::vector<std::string>& targets,
                    std::optional<double> valid_loss, int max_k) {
  if (candidates.size() != targets.size()) {
    throw LengthMismatchError("candidates and targets differ in length: " +
                              std::to_string(candidates.size()) + " vs " +
                              std::to_string(targets.size()));
  }
  EvalReport report;
  report.n = static_cast<std::int64_t>(targets.size());
  report.valid_loss = valid_loss;
  for (int k = 1; k <= max_k; ++k) {
    report.topk[k] = TopKAccuracy(candidates, targets, k);
  }
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    pairs.emplace_back(candidates[i].empty() ? std::vector<std::string>{}
                                             : BleuTokens(candidates[i][0]),
                       BleuTokens(targets[i]));
  }
  report.bleu4 = pairs.empty() ? 0 : CorpusBleu4(pairs);
  // Every candidate up to the depth counts, not just one per example.
  for (int depth : kSyntaxDepths) {
    std::int64_t valid = 0, total = 0;
    for (const auto& c : candidates) {
      const std::size_t n = std::min(c.size(), static_cast<std::size_t>(depth));
      for (std::size_t j = 0; j < n; ++j) {
        ++total;
        if (SyntaxCheck(c[j])) ++valid;
      }
    }
    report.syntax[depth] =
        total == 0 ? 0 : static_cast<double>(valid) / static_cast<double>(total);
  }
  return report;
}

std::string FormatCount(std::int64_t n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return n < 0 ? "-" + out : out;
}

std::string FormatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  nlohmann::ordered_json tk = nlohmann::ordered_json::object();
  for (const auto& [k, c] : topk) {
    tk[std::to_string(k)] = {{"correct", c.count}, {"fraction", c.fraction}};
  }
  j["topk"] = tk;
  j["bleu4"] = bleu4;
  nlohmann::ordered_json sx = nlohmann::ordered_json::object();
  for (const auto& [d, f] : syntax) sx[std::to_string(d)] = f;
  j["syntax"] = sx;
  if (valid_loss) {
    j["valid_loss"] = *valid_loss;
  } else {
    j["valid_loss"] = nullptr;
  }
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  char line[128];
  out << "Accurate predictions (n = " << FormatCount(n) << ")\n";
  out << "  k    correct      accuracy\n";
  for (int k : {1, 5, 10, 25, 50}) {
    auto it = topk.find(k);
    if (it == topk.end()) continue;
    std::snprintf(line, sizeof(line), "  %-4d %-12s %s\n", k,
                  FormatCount(it->second.count).c_str(),
                  FormatPercent(it->second.fraction).c_str());
    out << line;
  }
  out << "\nIntrinsic metrics\n";
  std::snprintf(line, sizeof(line), "  %-22s %.2f\n", "BLEU4", bleu4);
  out << line;
  for (const auto& [d, f] : syntax) {
    const std::string label = "Syntax top-" + std::to_string(d);
    std::snprintf(line, sizeof(line), "  %-22s %s\n", label.c_str(),
                  FormatPercent(f).c_str());
    out << line;
  }
  if (valid_loss) {
    std::snprintf(line, sizeof(line), "  %-22s %.4f\n", "Validation loss",
                  *valid_loss);
    out << line;
  }
  return out.str();
}

}  // namespace assertforge::evaluation
