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

#ifndef ASSERTFORGE_TEXTPREP_H_
#define ASSERTFORGE_TEXTPREP_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "assertforge/common.h"

namespace assertforge {

// Reserved ids. Byte b maps to kFirstByteId + b; learned merges follow.
enum SpecialId : int {
  kPadId = 0,
  kBosId = 1,
  kEosId = 2,
  kUnkId = 3,
  kMaskId = 4,
  kPlaceholderId = 5,
};
inline constexpr int kNumSpecials = 6;
inline constexpr int kFirstByteId = kNumSpecials;
inline constexpr int kMinVocabSize = kNumSpecials + 256;
inline constexpr int kDefaultVocabSize = 8192;

struct TokenSequence {
  std::vector<int> ids;
  std::uint64_t text_hash = 0;
};

// Byte-level BPE vocabulary. Immutable once built, so encode and decode may
// run concurrently.
class Vocabulary {
 public:
  // Specials and the 256 byte symbols, no merges.
  Vocabulary();

  // Learns merges until `vocab_size` ids exist or no pair occurs at least
  // `min_pair_count` times. Ties go to the lexicographically smaller pair of
  // token strings. Throws ConfigError below kMinVocabSize and
  // EmptyCorpusError when the corpus has no trainable text.
  static Vocabulary Train(const std::vector<std::string>& corpus,
                          int vocab_size, int min_pair_count = 2);

  static Vocabulary Parse(std::string_view serialized);
  static Vocabulary Load(const std::filesystem::path& path);
  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;
  // Digest of Serialize(); stored in checkpoints.
  std::string Digest() const;

  // `max_len` > 0 truncates the output.
  TokenSequence Encode(std::string_view text, int max_len = 0) const;
  // Specials other than PLACEHOLDER, MASK and UNK decode to nothing.
  std::string Decode(const std::vector<int>& ids) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::pair<int, int>>& merges() const { return merges_; }
  static bool IsSpecial(int id) { return id >= 0 && id < kNumSpecials; }

 private:
  void AddMerge(int left, int right);
  void EncodeChunk(std::string_view chunk, std::vector<int>* out) const;

  std::vector<std::string> tokens_;
  std::vector<std::pair<int, int>> merges_;
  // (left, right) packed into 64 bits -> merge rank.
  std::unordered_map<std::uint64_t, int> rank_;
};

// Splits text into the units BPE operates on: a word run (letters, digits,
// '_', non-ASCII bytes) or a single other character, each followed by its
// trailing whitespace. Whitespace with nothing before it forms its own chunk
// and the placeholder literal is always a chunk of its own.
std::vector<std::string_view> SplitChunks(std::string_view text);

}  // namespace assertforge

#endif  // ASSERTFORGE_TEXTPREP_H_
