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

#ifndef ASSERTFORGE_COMMON_H_
#define ASSERTFORGE_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace assertforge {

// Literal that stands in for the removed assert inside a test method.
inline constexpr std::string_view kPlaceholder = "<AssertPlaceHolder>";

// Base class for every domain error raised by the library. The CLI maps
// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or mismatched artifacts (vocabulary digest,
// checkpoint lineage).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Collapses every run of ASCII whitespace to a single space and trims both
// ends.
std::string NormalizeWhitespace(std::string_view text);

// 64-bit FNV-1a. Used for content digests and file-level deduplication.
std::uint64_t Fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string DigestHex(std::string_view data);

// splitmix64 finalizer; mixes (seed, index) into an independent stream seed.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t index);

bool IsValidUtf8(std::string_view text);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace assertforge

#endif  // ASSERTFORGE_COMMON_H_
