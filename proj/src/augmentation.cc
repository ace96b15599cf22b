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

#include "assertforge/augmentation.h"

#include <algorithm>
#include <cctype>

#include "assertforge/common.h"
#include "assertforge/evaluation.h"
#include "assertforge/java/lexer.h"
#include "assertforge/java/syntax.h"
#include "assertforge/mining.h"

namespace assertforge::augmentation {
namespace {

using java::Node;
using java::NodeKind;
using java::SyntaxTree;

// Token texts joined by single spaces; insensitive to layout.
std::string TokenKey(std::string_view text) {
  std::string key;
  for (const auto& tok : java::Lex(text).tokens) {
    if (tok.kind == java::TokenKind::kEnd) break;
    if (!key.empty()) key += ' ';
    key += tok.text;
  }
  return key;
}

int MethodNode(const SyntaxTree& tree) {
  const Node& wrapper = tree.node(tree.root());
  for (int c : wrapper.children) {
    const NodeKind k = tree.node(c).kind;
    if (k == NodeKind::kMethod || k == NodeKind::kConstructor) return c;
  }
  throw ParseError("expected a method declaration", 0);
}

int FirstChildOfKind(const SyntaxTree& tree, int id, NodeKind kind) {
  for (int c : tree.node(id).children) {
    if (tree.node(c).kind == kind) return c;
  }
  return -1;
}

// The block that receives the new statement: the try block when the body is
// a single try statement, else the method body.
int TargetBlock(const SyntaxTree& tree) {
  const int body = FirstChildOfKind(tree, MethodNode(tree), NodeKind::kBlock);
  if (body < 0) throw ParseError("method has no body", 0);
  const Node& b = tree.node(body);
  if (b.children.size() == 1 && tree.node(b.children[0]).kind == NodeKind::kTry) {
    const int inner = FirstChildOfKind(tree, b.children[0], NodeKind::kBlock);
    if (inner >= 0) return inner;
  }
  return body;
}

// Leading whitespace of the line holding `offset`.
std::string LineIndent(std::string_view text, std::size_t offset) {
  std::size_t start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
  start = start == std::string_view::npos ? 0 : start + 1;
  std::size_t end = start;
  while (end < text.size() && (text[end] == ' ' || text[end] == '\t')) ++end;
  return std::string(text.substr(start, end - start));
}

bool StartsUpper(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

std::string StripSemicolon(std::string_view stmt) {
  return evaluation::NormalizeAssert(stmt);
}

}  // namespace

Scope BuildScope(std::string_view test_source, std::string_view focal_source) {
  Scope scope;
  const SyntaxTree test = java::ParseMember(std::string(test_source));
  test.Walk(test.root(), [&](int id) {
    const Node& n = test.node(id);
    if ((n.kind == NodeKind::kParam || n.kind == NodeKind::kDeclarator) &&
        !n.name.empty()) {
      scope.variables.insert(n.name);
    }
    return true;
  });
  if (NormalizeWhitespace(focal_source).empty()) return scope;
  std::vector<mining::JavaClass> classes;
  try {
    classes = mining::ParseJava(focal_source);
  } catch (const ParseError&) {
    classes = mining::CollectClasses(java::ParseMember(std::string(focal_source)));
  }
  for (const auto& cls : classes) {
    if (!cls.name.empty()) {
      scope.variables.insert(cls.name);
      scope.classes.insert(cls.name);
    }
    for (const auto& f : cls.static_fields) scope.variables.insert(f);
    for (const auto& m : cls.methods) scope.methods.insert(m.name);
  }
  return scope;
}

std::vector<std::string> UnresolvedNames(std::string_view candidate,
                                         const Scope& scope) {
  const SyntaxTree tree = java::ParseExpression(StripSemicolon(candidate));
  std::set<std::string> local;  // lambda parameters and pattern bindings
  tree.Walk(tree.root(), [&](int id) {
    const Node& n = tree.node(id);
    if (n.kind == NodeKind::kParam || n.kind == NodeKind::kDeclarator) {
      local.insert(n.name);
    }
    return true;
  });
  std::vector<std::string> missing;
  auto miss = [&](const std::string& name) {
    if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
      missing.push_back(name);
    }
  };
  tree.Walk(tree.root(), [&](int id) {
    const Node& n = tree.node(id);
    if (n.kind == NodeKind::kName) {
      if (!StartsUpper(n.name) && !scope.variables.count(n.name) &&
          !local.count(n.name)) {
        miss(n.name);
      }
    } else if (n.kind == NodeKind::kMethodCall && !n.has_target) {
      if (!mining::IsAssertCallName(n.name) && !scope.methods.count(n.name)) {
        miss(n.name + "()");
      }
    } else if (n.kind == NodeKind::kMethodCall && !n.children.empty()) {
      const Node& target = tree.node(n.children[0]);
      if (target.kind == NodeKind::kName && scope.classes.count(target.name) &&
          !scope.methods.count(n.name)) {
        miss(target.name + "." + n.name + "()");
      }
    } else if (n.kind == NodeKind::kTypeRef) {
      return false;
    }
    return true;
  });
  return missing;
}

Selection SelectAssert(const std::vector<std::string>& candidates,
                       std::string_view test_source,
                       std::string_view focal_source) {
  Selection out;
  const Scope scope = BuildScope(test_source, focal_source);
  std::set<std::string> existing;
  const SyntaxTree test = java::ParseMember(std::string(test_source));
  test.Walk(test.root(), [&](int id) {
    if (mining::IsAssertCall(test, id)) existing.insert(TokenKey(test.Text(id)));
    return true;
  });
  for (const std::string& cand : candidates) {
    if (!evaluation::SyntaxCheck(cand)) {
      out.rejected.push_back({cand, "syntax"});
      continue;
    }
    const auto missing = UnresolvedNames(cand, scope);
    if (!missing.empty()) {
      out.rejected.push_back({cand, "scope: " + missing.front()});
      continue;
    }
    if (existing.count(TokenKey(StripSemicolon(cand)))) {
      out.rejected.push_back({cand, "duplicate"});
      continue;
    }
    out.chosen = StripSemicolon(cand);
    break;
  }
  return out;
}

std::string InsertAssert(std::string_view test_source,
                         std::string_view assert_stmt) {
  const std::string stmt = StripSemicolon(assert_stmt);
  if (!evaluation::SyntaxCheck(stmt)) {
    throw ParseError("not a single statement: " + stmt, 0);
  }
  std::string source(test_source);
  const SyntaxTree tree = java::ParseMember(source);
  const int block = TargetBlock(tree);
  const Node& b = tree.node(block);
  std::string out;
  if (b.children.empty()) {
    const std::string indent = LineIndent(source, b.begin) + "  ";
    out = source.substr(0, b.begin + 1) + "\n" + indent + stmt + ";\n" +
          LineIndent(source, b.end - 1) + source.substr(b.end - 1);
  } else {
    const Node& last = tree.node(b.children.back());
    const std::string indent = LineIndent(source, last.begin);
    if (last.kind == NodeKind::kReturn) {
      out = source.substr(0, last.begin) + stmt + ";\n" + indent +
            source.substr(last.begin);
    } else {
      out = source.substr(0, last.end) + "\n" + indent + stmt + ";" +
            source.substr(last.end);
    }
  }
  java::ParseMember(out);  // the result must still be one valid member
  return out;
}

std::string FinalStatement(std::string_view test_source) {
  const SyntaxTree tree = java::ParseMember(std::string(test_source));
  const Node& b = tree.node(TargetBlock(tree));
  if (b.children.empty()) return "";
  return std::string(tree.Text(b.children.back()));
}

AugmentationResult Augment(const std::vector<std::string>& candidates,
                           std::string_view test_source,
                           std::string_view focal_source) {
  AugmentationResult r;
  r.original_test = std::string(test_source);
  Selection sel = SelectAssert(candidates, test_source, focal_source);
  r.rejected = std::move(sel.rejected);
  if (sel.chosen) {
    r.chosen_assert = *sel.chosen;
    r.augmented_test = InsertAssert(test_source, *sel.chosen);
  }
  return r;
}

}  // namespace assertforge::augmentation
