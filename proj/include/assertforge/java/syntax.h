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

#ifndef ASSERTFORGE_JAVA_SYNTAX_H_
#define ASSERTFORGE_JAVA_SYNTAX_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "assertforge/java/lexer.h"

namespace assertforge::java {

enum class NodeKind {
  // Declarations.
  kCompilationUnit,
  kTypeDecl,  // class, interface, enum, record, @interface
  kMethod,
  kConstructor,
  kField,
  kInitializer,
  kParam,
  kAnnotation,
  kEnumConstant,
  // Statements.
  kBlock,
  kLocalVar,
  kDeclarator,
  kLocalType,
  kExprStmt,
  kIf,
  kWhile,
  kDoWhile,
  kFor,
  kForEach,
  kTry,
  kResource,
  kCatch,
  kFinally,
  kSwitch,
  kSwitchCase,
  kReturn,
  kThrow,
  kBreak,
  kContinue,
  kSynchronized,
  kAssertKeyword,
  kLabeled,
  kYield,
  kEmpty,
  // Expressions.
  kName,
  kFieldAccess,
  kMethodCall,
  kNew,
  kNewArray,
  kArrayInit,
  kLiteral,
  kUnary,
  kPostfix,
  kBinary,
  kAssign,
  kConditional,
  kCast,
  kInstanceOf,
  kIndex,
  kLambda,
  kMethodRef,
  kClassLiteral,
  kThis,
  kSuper,
  kParens,
  kSwitchExpr,
  kTypeRef,  // a type written in expression position (cast target, etc.)
};

const char* NodeKindName(NodeKind kind);

struct Node {
  NodeKind kind;
  std::size_t begin = 0;  // byte offsets into the parsed source
  std::size_t end = 0;
  // Identifier carried by the node: declared name, called method name,
  // operator text, or type name depending on kind.
  std::string name;
  // Offset of the `name` token, where one exists.
  std::size_t name_pos = 0;
  // kMethod / kConstructor: first token after leading annotations.
  std::size_t decl_begin = 0;
  // kMethodCall / kFieldAccess: whether an explicit receiver child is first.
  bool has_target = false;
  // kMethod / kField / kTypeDecl: modifiers are static.
  bool is_static = false;
  std::vector<int> children;
};

// Arena-allocated syntax tree.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(std::string source, std::vector<Node> nodes,
             std::vector<CommentSpan> comments, int root)
      : source_(std::move(source)),
        nodes_(std::move(nodes)),
        comments_(std::move(comments)),
        root_(root) {}

  const std::string& source() const { return source_; }
  const std::vector<CommentSpan>& comments() const { return comments_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  std::string_view Text(int id) const;

  // Pre-order traversal; `visit` returns false to skip a subtree.
  void Walk(int id, const std::function<bool(int)>& visit) const;

  // Nested kind sequence; equal for two parses of the same structure.
  std::string StructureSignature(int id) const;

 private:
  std::string source_;
  std::vector<Node> nodes_;
  std::vector<CommentSpan> comments_;
  int root_ = 0;
};

// All parse entry points throw ParseError on malformed input and
// EncodingError on bytes that are not valid UTF-8.
SyntaxTree ParseCompilationUnit(std::string source);
// A single class-body member (method, constructor, field). The root is a
// kTypeDecl wrapper whose only child is the member.
SyntaxTree ParseMember(std::string source);
// One block statement; the root is the statement node.
SyntaxTree ParseStatement(std::string source);
// One expression covering the whole input.
SyntaxTree ParseExpression(std::string source);

// Java's statement-expression rule: assignment, increment/decrement, method
// invocation, or instance creation.
bool IsStatementExpression(const Node& node);

}  // namespace assertforge::java

#endif  // ASSERTFORGE_JAVA_SYNTAX_H_
