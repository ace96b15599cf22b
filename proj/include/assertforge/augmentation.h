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

#ifndef ASSERTFORGE_AUGMENTATION_H_
#define ASSERTFORGE_AUGMENTATION_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace assertforge::augmentation {

struct Rejection {
  std::string candidate;
  std::string reason;  // "syntax", "scope: <name>", "duplicate"
};

struct Selection {
  std::optional<std::string> chosen;
  std::vector<Rejection> rejected;
};

// Names an assert may mention without further qualification: locals,
// parameters and other variables declared in the test, plus the focal
// class name, its static fields and its methods.
struct Scope {
  std::set<std::string> variables;
  std::set<std::string> methods;
  std::set<std::string> classes;  // focal classes; calls through them must resolve
};

// `test_source` is one method declaration. `focal_source` is either a whole
// compilation unit or a single member; it may be empty.
Scope BuildScope(std::string_view test_source, std::string_view focal_source);

// Names the candidate uses that `scope` cannot account for. Capitalized
// qualifiers count as type references and always resolve, except that a
// method called through a focal class name must be one of its methods.
std::vector<std::string> UnresolvedNames(std::string_view candidate,
                                         const Scope& scope);

// Walks the ranked candidates and keeps the first that parses, resolves
// lexically, and does not repeat an assert already in the test.
Selection SelectAssert(const std::vector<std::string>& candidates,
                       std::string_view test_source,
                       std::string_view focal_source);

// Adds `assert_stmt` as the last statement of the method in `test_source`.
// A body made of one try statement receives it at the end of the try block;
// a body ending in return receives it just before the return. Indentation
// follows the neighbouring statement. Throws ParseError when either input is
// malformed.
std::string InsertAssert(std::string_view test_source,
                         std::string_view assert_stmt);

// Text of the last statement in the block InsertAssert would extend.
std::string FinalStatement(std::string_view test_source);

struct AugmentationResult {
  std::string original_test;
  std::optional<std::string> chosen_assert;
  std::optional<std::string> augmented_test;
  std::vector<Rejection> rejected;
};

AugmentationResult Augment(const std::vector<std::string>& candidates,
                           std::string_view test_source,
                           std::string_view focal_source);

}  // namespace assertforge::augmentation

#endif  // ASSERTFORGE_AUGMENTATION_H_
