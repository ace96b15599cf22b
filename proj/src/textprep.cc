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

#include "assertforge/textprep.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace assertforge {
namespace {

constexpr std::string_view kHeader = "#assertforge-vocab v1";
constexpr const char* kSpecialNames[kNumSpecials] = {
    "<pad>", "<s>", "</s>", "<unk>", "<mask>", "<AssertPlaceHolder>"};

bool IsSpaceByte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

std::uint64_t PackPair(int left, int right) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
         static_cast<std::uint32_t>(right);
}

std::string Escape(std::string_view token) {
  std::string out;
  for (unsigned char c : token) {
    if (c > 0x20 && c < 0x7f && c != '\\') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[5];
      std::snprintf(buf, sizeof(buf), "\\x%02x", c);
      out += buf;
    }
  }
  return out;
}

std::string Unescape(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      if (i + 3 >= text.size()) {
        throw ParseError("truncated escape in vocabulary", i);
      }
      if (text[i + 1] != 'x') throw ParseError("bad escape in vocabulary", i);
      out.push_back(static_cast<char>(
          std::stoi(std::string(text.substr(i + 2, 2)), nullptr, 16)));
      i += 3;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

// Replaces every left-to-right occurrence of (left, right) with `merged`.
void ApplyMerge(std::vector<int>& syms, int left, int right, int merged) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < syms.size(); ++r) {
    if (r + 1 < syms.size() && syms[r] == left && syms[r + 1] == right) {
      syms[w++] = merged;
      ++r;
    } else {
      syms[w++] = syms[r];
    }
  }
  syms.resize(w);
}

}  // namespace

std::vector<std::string_view> SplitChunks(std::string_view text) {
  std::vector<std::string_view> chunks;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_space = [&](std::size_t j) {
    while (j < n && IsSpaceByte(static_cast<unsigned char>(text[j]))) ++j;
    return j;
  };
  while (i < n) {
    const std::size_t begin = i;
    if (text.compare(i, kPlaceholder.size(), kPlaceholder) == 0) {
      i += kPlaceholder.size();
      chunks.push_back(text.substr(begin, i - begin));
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsSpaceByte(c)) {
      i = skip_space(i);
    } else if (IsWordByte(c)) {
      while (i < n && IsWordByte(static_cast<unsigned char>(text[i]))) ++i;
      i = skip_space(i);
    } else {
      i = skip_space(i + 1);
    }
    chunks.push_back(text.substr(begin, i - begin));
  }
  return chunks;
}

Vocabulary::Vocabulary() {
  tokens_.reserve(kMinVocabSize);
  for (const char* name : kSpecialNames) tokens_.emplace_back(name);
  for (int b = 0; b < 256; ++b) tokens_.emplace_back(1, static_cast<char>(b));
}

void Vocabulary::AddMerge(int left, int right) {
  rank_[PackPair(left, right)] = static_cast<int>(merges_.size());
  merges_.emplace_back(left, right);
  tokens_.push_back(tokens_[static_cast<std::size_t>(left)] +
                    tokens_[static_cast<std::size_t>(right)]);
}

Vocabulary Vocabulary::Train(const std::vector<std::string>& corpus,
                             int vocab_size, int min_pair_count) {
  if (vocab_size < kMinVocabSize) {
    throw ConfigError("vocab_size " + std::to_string(vocab_size) +
                      " is below the minimum of " +
                      std::to_string(kMinVocabSize));
  }
  // Ordered map so the symbol lists below have a fixed order.
  std::map<std::string_view, std::int64_t> chunk_counts;
  for (const std::string& text : corpus) {
    for (std::string_view chunk : SplitChunks(text)) {
      if (chunk == kPlaceholder) continue;
      ++chunk_counts[chunk];
    }
  }
  if (chunk_counts.empty()) {
    throw EmptyCorpusError("vocabulary corpus contains no text");
  }
  struct Word {
    std::vector<int> syms;
    std::int64_t count;
  };
  std::vector<Word> words;
  words.reserve(chunk_counts.size());
  for (const auto& [chunk, count] : chunk_counts) {
    Word w{{}, count};
    for (unsigned char c : chunk) w.syms.push_back(kFirstByteId + c);
    words.push_back(std::move(w));
  }

  Vocabulary vocab;
  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  while (vocab.size() < vocab_size) {
    pair_counts.clear();
    for (const Word& w : words) {
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
        pair_counts[PackPair(w.syms[i], w.syms[i + 1])] += w.count;
      }
    }
    std::uint64_t best = 0;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count < best_count) continue;
      if (count == best_count) {
        const auto lp = static_cast<std::size_t>(pair >> 32);
        const auto rp = static_cast<std::size_t>(pair & 0xffffffffu);
        const auto lb = static_cast<std::size_t>(best >> 32);
        const auto rb = static_cast<std::size_t>(best & 0xffffffffu);
        const auto key = std::tie(vocab.tokens_[lp], vocab.tokens_[rp]);
        if (key >= std::tie(vocab.tokens_[lb], vocab.tokens_[rb])) continue;
      }
      best = pair;
      best_count = count;
    }
    if (best_count < std::max(min_pair_count, 1)) break;
    const int left = static_cast<int>(best >> 32);
    const int right = static_cast<int>(best & 0xffffffffu);
    const int merged = vocab.size();
    vocab.AddMerge(left, right);
    for (Word& w : words) ApplyMerge(w.syms, left, right, merged);
  }
  return vocab;
}

void Vocabulary::EncodeChunk(std::string_view chunk,
                             std::vector<int>* out) const {
  std::vector<int> syms;
  syms.reserve(chunk.size());
  for (unsigned char c : chunk) syms.push_back(kFirstByteId + c);
  while (syms.size() > 1) {
    int best_rank = -1;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = rank_.find(PackPair(syms[i], syms[i + 1]));
      if (it != rank_.end() && (best_rank < 0 || it->second < best_rank)) {
        best_rank = it->second;
      }
    }
    if (best_rank < 0) break;
    const auto [left, right] = merges_[static_cast<std::size_t>(best_rank)];
    ApplyMerge(syms, left, right, kMinVocabSize + best_rank);
  }
  out->insert(out->end(), syms.begin(), syms.end());
}

TokenSequence Vocabulary::Encode(std::string_view text, int max_len) const {
  TokenSequence seq;
  seq.text_hash = Fnv1a64(text);
  for (std::string_view chunk : SplitChunks(text)) {
    if (chunk == kPlaceholder) {
      seq.ids.push_back(kPlaceholderId);
    } else {
      EncodeChunk(chunk, &seq.ids);
    }
    if (max_len > 0 && static_cast<int>(seq.ids.size()) >= max_len) break;
  }
  if (max_len > 0 && static_cast<int>(seq.ids.size()) > max_len) {
    seq.ids.resize(static_cast<std::size_t>(max_len));
  }
  return seq;
}

std::string Vocabulary::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (id < 0 || id >= size()) {
      out += kSpecialNames[kUnkId];
      continue;
    }
    switch (id) {
      case kPadId:
      case kBosId:
      case kEosId:
        break;
      case kUnkId:
      case kMaskId:
        out += kSpecialNames[id];
        break;
      case kPlaceholderId:
        out += kPlaceholder;
        break;
      default:
        out += tokens_[static_cast<std::size_t>(id)];
    }
  }
  return out;
}

std::string Vocabulary::Serialize() const {
  std::ostringstream out;
  out << kHeader << '\n';
  out << "merges " << merges_.size() << '\n';
  for (const auto& [l, r] : merges_) out << l << ' ' << r << '\n';
  out << "tokens " << tokens_.size() << '\n';
  for (const std::string& t : tokens_) out << Escape(t) << '\n';
  return out.str();
}

Vocabulary Vocabulary::Parse(std::string_view serialized) {
  std::istringstream in{std::string(serialized)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ParseError("not a vocabulary file", 0);
  }
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "merges") {
    throw ParseError("missing merges header", 0);
  }
  Vocabulary vocab;
  for (std::size_t i = 0; i < count; ++i) {
    int l = 0;
    int r = 0;
    if (!(in >> l >> r) || l < 0 || r < 0 || l >= vocab.size() ||
        r >= vocab.size()) {
      throw ParseError("bad merge rule " + std::to_string(i), 0);
    }
    vocab.AddMerge(l, r);
  }
  if (!(in >> word >> count) || word != "tokens" ||
      count != vocab.tokens_.size()) {
    throw ParseError("token count does not match merges", 0);
  }
  std::getline(in, line);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated token list", 0);
    if (Unescape(line) != vocab.tokens_[i]) {
      throw ParseError("token " + std::to_string(i) + " disagrees with merges",
                       0);
    }
  }
  return vocab;
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize());
}

std::string Vocabulary::Digest() const { return DigestHex(Serialize()); }

}  // namespace assertforge
