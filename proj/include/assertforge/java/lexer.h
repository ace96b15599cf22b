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

#ifndef ASSERTFORGE_JAVA_LEXER_H_
#define ASSERTFORGE_JAVA_LEXER_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace assertforge::java {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kIntLiteral,
  kFloatLiteral,
  kCharLiteral,
  kStringLiteral,
  kTextBlock,
  kOperator,  // operators and separators
  kEnd,
};

struct Token {
  TokenKind kind;
  std::string_view text;  // view into the lexed source
  std::size_t begin;
  std::size_t end;
};

struct CommentSpan {
  std::size_t begin;
  std::size_t end;
};

struct LexResult {
  std::vector<Token> tokens;  // terminated by a kEnd token
  std::vector<CommentSpan> comments;
};

// Tokenizes Java source. `>` is always emitted as a single-character token so
// the parser can close nested type arguments; the parser re-joins adjacent `>`
// tokens into shift and comparison operators. Throws ParseError on an
// unterminated literal or comment, or a byte that cannot start a token.
LexResult Lex(std::string_view source);

bool IsJavaKeyword(std::string_view word);

}  // namespace assertforge::java

#endif  // ASSERTFORGE_JAVA_LEXER_H_
