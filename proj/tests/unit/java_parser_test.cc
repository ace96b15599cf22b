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

#include "assertforge/java/syntax.h"

#include <gtest/gtest.h>

#include "assertforge/common.h"
#include "assertforge/java/lexer.h"

namespace assertforge::java {
namespace {

int CountKind(const SyntaxTree& tree, NodeKind kind) {
  int n = 0;
  tree.Walk(tree.root(), [&](int id) {
    if (tree.node(id).kind == kind) ++n;
    return true;
  });
  return n;
}

TEST(JavaParserTest, CompilationUnitWithGenericsAndLambdas) {
  const auto tree = ParseCompilationUnit(R"(
package a.b;
import java.util.*;
@SuppressWarnings("x")
public class Foo<T extends Comparable<T>> extends Bar implements Baz {
  private static final int K = 1 << 3;
  private final Map<String, List<T>> m = new HashMap<>();
  public Foo() { super(); }
  @Override public <R> R apply(Function<? super T, R> f, T... xs) throws Exception {
    Runnable r = () -> { int y = xs.length; };
    for (T x : xs) { if (x == null) continue; }
    switch (K) { case 1: break; default: return f.apply(xs[0]); }
    return xs.length > 0 ? f.apply(xs[0]) : null;
  }
  enum Color { RED, GREEN; }
  interface Inner { void run(); }
}
)");
  EXPECT_EQ(CountKind(tree, NodeKind::kTypeDecl), 3);
  EXPECT_EQ(CountKind(tree, NodeKind::kMethod), 2);
  EXPECT_EQ(CountKind(tree, NodeKind::kConstructor), 1);
  EXPECT_GE(CountKind(tree, NodeKind::kLambda), 1);
}

TEST(JavaParserTest, StatementForms) {
  const char* stmts[] = {
      "try (InputStream in = open()) { read(in); } catch (IOException | RuntimeException e) { } finally { close(); }",
      "do { i++; } while (i < 3);",
      "label: for (int i = 0, j = 1; i < j; i++, j--) { break label; }",
      "synchronized (lock) { x = y += 2; }",
      "assert x > 0 : \"positive\";",
      "int[][] grid = new int[3][];",
      "String s = (String) o;",
      "Object o = x instanceof String t ? t : null;",
      "list.forEach(System.out::println);",
      "var n = switch (k) { case 1 -> 2; default -> { yield 3; } };",
  };
  for (const char* s : stmts) {
    EXPECT_NO_THROW(ParseStatement(s)) << s;
  }
}

TEST(JavaParserTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseCompilationUnit("class A { void m() { int x = ; } }"), ParseError);
  EXPECT_THROW(ParseCompilationUnit("class A { void m() { "), ParseError);
  EXPECT_THROW(ParseStatement("x +;"), ParseError);
  EXPECT_THROW(ParseExpression("a.(b)"), ParseError);
}

TEST(JavaParserTest, SpansCoverSourceText) {
  const auto tree = ParseExpression("assertEquals(a.b(), c)");
  EXPECT_EQ(tree.Text(tree.root()), "assertEquals(a.b(), c)");
  const Node& call = tree.node(tree.root());
  EXPECT_EQ(call.kind, NodeKind::kMethodCall);
  EXPECT_EQ(call.name, "assertEquals");
  EXPECT_FALSE(call.has_target);
}

TEST(JavaParserTest, StructureSignatureIgnoresFormatting) {
  const auto a = ParseStatement("if (x) { f(1); }");
  const auto b = ParseStatement("if(x){\n  f( 1 );\n}");
  EXPECT_EQ(a.StructureSignature(a.root()), b.StructureSignature(b.root()));
}

TEST(JavaLexerTest, CommentsAndLiterals) {
  const std::string src = "a /* c */ + \"s\\\"\" // t\n'x' 1.5e3f 0x1FL \"\"\"\n  block\n  \"\"\"";
  const auto lexed = Lex(src);
  ASSERT_GE(lexed.tokens.size(), 7u);
  EXPECT_EQ(lexed.comments.size(), 2u);
  EXPECT_EQ(lexed.tokens[2].kind, TokenKind::kStringLiteral);
  EXPECT_EQ(lexed.tokens[3].kind, TokenKind::kCharLiteral);
  EXPECT_EQ(lexed.tokens[4].kind, TokenKind::kFloatLiteral);
  EXPECT_EQ(lexed.tokens[5].kind, TokenKind::kIntLiteral);
  EXPECT_EQ(lexed.tokens[6].kind, TokenKind::kTextBlock);
}

TEST(JavaLexerTest, UnterminatedCommentFails) {
  EXPECT_THROW(Lex("a /* never closed"), ParseError);
}

}  // namespace
}  // namespace assertforge::java
