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

#ifndef ASSERTFORGE_MINING_H_
#define ASSERTFORGE_MINING_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "assertforge/common.h"
#include "assertforge/java/syntax.h"

namespace assertforge::mining {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Invocation {
  std::string receiver;  // normalized source text of the receiver, or empty
  std::string name;
  int arg_count = 0;
  std::size_t position = 0;  // file offset of the method-name token
};

// A JUnit assert call used as a statement.
struct AssertSite {
  Span statement;   // includes the trailing ';'
  Span expression;  // the call expression alone
  std::string call_name;
};

struct JavaMethod {
  std::string name;
  std::string class_name;
  std::vector<std::string> annotations;  // simple names, e.g. "Test"
  // Declaration text from the first token after leading annotations, with
  // comments blanked to spaces (offsets stay aligned with the file).
  std::string text;
  std::string body_text;
  std::vector<Invocation> invocations;  // ordered by position
  std::vector<AssertSite> asserts;      // ordered by position
  Span span;       // whole declaration including annotations
  Span text_span;  // the region `text` was taken from
  Span body_span;  // `{ ... }`, empty when there is no body
  bool is_static = false;
  bool is_constructor = false;

  bool HasAnnotation(std::string_view simple_name) const;
};

struct JavaClass {
  std::string name;
  std::vector<JavaMethod> methods;
  std::vector<std::string> static_fields;
};

// Every method and constructor declared in the compilation unit, grouped by
// the class that declares it (nested classes are listed separately).
std::vector<JavaClass> ParseJava(std::string_view source);

// Builds JavaMethod records from an already parsed compilation unit or member.
std::vector<JavaClass> CollectClasses(const java::SyntaxTree& tree);

bool IsAssertCallName(std::string_view name);
// True when `call` is a recognized assert invocation: a recognized name with
// no receiver or an `Assert` / `Assertions` receiver (optionally qualified).
bool IsAssertCall(const java::SyntaxTree& tree, int call);

// Methods annotated with @Test that contain exactly one assert statement.
std::vector<JavaMethod> ExtractCandidates(const std::vector<JavaMethod>& methods);

// Name-keyed index of methods that may be focal methods.
class FocalIndex {
 public:
  FocalIndex() = default;
  // Entries of `parent` are visible through this index too.
  explicit FocalIndex(const FocalIndex* parent) : parent_(parent) {}

  void Add(const JavaMethod& method, const std::string& path);
  void AddClasses(const std::vector<JavaClass>& classes,
                  const std::string& path, bool skip_tests);

  // Resolves `name`, preferring the class the test class is named after
  // (`FooTest`, `TestFoo` -> `Foo`), then the first entry by path order.
  const JavaMethod* Lookup(std::string_view name,
                           std::string_view test_class) const;
  std::size_t size() const;

 private:
  struct Entry {
    std::shared_ptr<const JavaMethod> method;
    std::string path;
    std::uint64_t order;
  };
  void Collect(std::string_view name, std::vector<const Entry*>* out) const;

  const FocalIndex* parent_ = nullptr;
  std::unordered_map<std::string, std::vector<Entry>> entries_;
  std::uint64_t next_order_ = 0;
};

std::string FocalClassFor(std::string_view test_class);

// Last non-assert invocation positioned before or inside the assert that
// resolves in `index`; nullopt when none does.
std::optional<JavaMethod> ResolveFocal(const JavaMethod& test,
                                       const FocalIndex& index);

class ReplacementError : public Error {
 public:
  using Error::Error;
};

struct TestAssertPair {
  std::string test_with_placeholder;
  std::string focal_method;
  std::string assert_stmt;
  std::string source_text;  // test_with_placeholder + " " + focal_method
  std::string target_text;  // assert_stmt
  std::string file;
  std::string method;
};

TestAssertPair MakeTap(const JavaMethod& test, const JavaMethod& focal,
                       std::string file = "");

struct SplitRatios {
  double train = 0.80;
  double valid = 0.10;
  double test = 0.10;
};

struct CorpusSplit {
  std::vector<TestAssertPair> train;
  std::vector<TestAssertPair> valid;
  std::vector<TestAssertPair> test;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

// floor(n * train) and floor(n * test); validation takes the remainder.
SplitCounts ComputeSplitCounts(std::size_t n, const SplitRatios& ratios);

// Deterministic seeded shuffle followed by a partition with the counts above.
// Throws EmptyCorpusError on an empty input.
CorpusSplit SplitCorpus(std::vector<TestAssertPair> taps,
                        const SplitRatios& ratios, std::uint64_t seed);

struct MiningOptions {
  std::filesystem::path src_dir;
  std::filesystem::path focal_dir;  // defaults to src_dir when empty
  int jobs = 1;
  // Drop the focal method from the source (auto-completion corpus variant).
  bool without_focal = false;
};

struct MiningStats {
  std::size_t files = 0;
  std::size_t parse_errors = 0;
  std::size_t test_methods = 0;
  std::size_t candidates = 0;
  std::size_t unresolved_focal = 0;
  std::size_t replacement_errors = 0;
  std::vector<std::string> failed_files;
};

struct MiningResult {
  std::vector<TestAssertPair> taps;  // ordered by (file, method position)
  MiningStats stats;
};

MiningResult MineDirectory(const MiningOptions& options);

// One JSON object per line with keys source, target, file, method.
std::string ToJsonl(const std::vector<TestAssertPair>& taps);
std::vector<TestAssertPair> ReadTapJsonl(const std::filesystem::path& path);

}  // namespace assertforge::mining

#endif  // ASSERTFORGE_MINING_H_
