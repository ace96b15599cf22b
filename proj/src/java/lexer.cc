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

#include "assertforge/java/lexer.h"

#include <algorithm>
#include <iterator>
#include <cctype>
#include <string>

#include "assertforge/common.h"

namespace assertforge::java {
namespace {

constexpr std::string_view kKeywords[] = {
    "abstract", "assert",       "boolean",   "break",      "byte",
    "case",     "catch",        "char",      "class",      "const",
    "continue", "default",      "do",        "double",     "else",
    "enum",     "extends",      "final",     "finally",    "float",
    "for",      "goto",         "if",        "implements", "import",
    "instanceof", "int",        "interface", "long",       "native",
    "new",      "package",      "private",   "protected",  "public",
    "return",   "short",        "static",    "strictfp",   "super",
    "switch",   "synchronized", "this",      "throw",      "throws",
    "transient", "try",         "void",      "volatile",   "while",
    "true",     "false",        "null",
};

// Longest first within each leading character. `>`-prefixed operators other
// than `>` itself are deliberately absent.
constexpr std::string_view kOperators[] = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    "+=",  "-=",  "*=", "/=", "&=", "|=", "^=", "%=", "<<", "(",  ")",
    "{",   "}",   "[",  "]",  ";",  ",",  ".",  "@",  "=",  ">",  "<",
    "!",   "~",   "?",  ":",  "+",
};
constexpr std::string_view kMoreOperators[] = {
    "-", "*", "/", "&", "|", "^", "%",
};

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool IsIdentPart(unsigned char c) {
  return IsIdentStart(c) || std::isdigit(c);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult Run() {
    LexResult result;
    while (true) {
      SkipTrivia(result.comments);
      if (pos_ >= src_.size()) break;
      result.tokens.push_back(Next());
    }
    result.tokens.push_back(
        Token{TokenKind::kEnd, std::string_view(), src_.size(), src_.size()});
    return result;
  }

 private:
  char Peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void SkipTrivia(std::vector<CommentSpan>& comments) {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        ++pos_;
      } else if (c == '/' && Peek(1) == '/') {
        const std::size_t begin = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        comments.push_back({begin, pos_});
      } else if (c == '/' && Peek(1) == '*') {
        const std::size_t begin = pos_;
        const std::size_t close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw ParseError("unterminated block comment", begin);
        }
        pos_ = close + 2;
        comments.push_back({begin, pos_});
      } else {
        break;
      }
    }
  }

  Token Make(TokenKind kind, std::size_t begin) const {
    return Token{kind, src_.substr(begin, pos_ - begin), begin, pos_};
  }

  Token Next() {
    const std::size_t begin = pos_;
    const auto c = static_cast<unsigned char>(src_[pos_]);
    if (IsIdentStart(c)) {
      while (pos_ < src_.size() &&
             IsIdentPart(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      const Token t = Make(TokenKind::kIdentifier, begin);
      return IsJavaKeyword(t.text) ? Make(TokenKind::kKeyword, begin) : t;
    }
    if (std::isdigit(c) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(Peek(1))))) {
      return Number();
    }
    if (c == '"') {
      if (Peek(1) == '"' && Peek(2) == '"') return TextBlock();
      return Quoted('"', TokenKind::kStringLiteral);
    }
    if (c == '\'') return Quoted('\'', TokenKind::kCharLiteral);
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return Make(TokenKind::kOperator, begin);
      }
    }
    for (std::string_view op : kMoreOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return Make(TokenKind::kOperator, begin);
      }
    }
    throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'",
                     begin);
  }

  void Digits(bool hex) {
    while (pos_ < src_.size()) {
      const auto d = static_cast<unsigned char>(src_[pos_]);
      if (d == '_' || (hex ? std::isxdigit(d) : std::isdigit(d))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Token Number() {
    const std::size_t begin = pos_;
    bool is_float = false;
    if (Peek() == '0' && (Peek(1) == 'x' || Peek(1) == 'X')) {
      pos_ += 2;
      Digits(true);
      if (Peek() == '.') {
        ++pos_;
        Digits(true);
        is_float = true;
      }
      if (Peek() == 'p' || Peek() == 'P') {
        ++pos_;
        if (Peek() == '+' || Peek() == '-') ++pos_;
        Digits(false);
        is_float = true;
      }
    } else if (Peek() == '0' && (Peek(1) == 'b' || Peek(1) == 'B')) {
      pos_ += 2;
      Digits(false);
    } else {
      Digits(false);
      if (Peek() == '.' &&
          !IsIdentStart(static_cast<unsigned char>(Peek(1))) &&
          Peek(1) != '.') {
        ++pos_;
        Digits(false);
        is_float = true;
      }
      if (Peek() == 'e' || Peek() == 'E') {
        ++pos_;
        if (Peek() == '+' || Peek() == '-') ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(Peek()))) {
          throw ParseError("malformed exponent", begin);
        }
        Digits(false);
        is_float = true;
      }
    }
    const char s = Peek();
    if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
      ++pos_;
      is_float = true;
    } else if (!is_float && (s == 'l' || s == 'L')) {
      ++pos_;
    }
    if (IsIdentPart(static_cast<unsigned char>(Peek()))) {
      throw ParseError("malformed numeric literal", begin);
    }
    return Make(is_float ? TokenKind::kFloatLiteral : TokenKind::kIntLiteral,
                begin);
  }

  Token Quoted(char quote, TokenKind kind) {
    const std::size_t begin = pos_++;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError("unterminated literal", begin);
      }
      const char c = src_[pos_++];
      if (c == '\\') {
        if (pos_ >= src_.size()) throw ParseError("unterminated literal", begin);
        ++pos_;
      } else if (c == quote) {
        break;
      }
    }
    return Make(kind, begin);
  }

  Token TextBlock() {
    const std::size_t begin = pos_;
    pos_ += 3;
    while (true) {
      if (pos_ + 3 > src_.size()) {
        throw ParseError("unterminated text block", begin);
      }
      if (src_[pos_] == '\\') {
        pos_ += 2;
        continue;
      }
      if (src_.compare(pos_, 3, "\"\"\"") == 0) {
        pos_ += 3;
        break;
      }
      ++pos_;
    }
    return Make(TokenKind::kTextBlock, begin);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

bool IsJavaKeyword(std::string_view word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) !=
         std::end(kKeywords);
}

LexResult Lex(std::string_view source) { return Lexer(source).Run(); }

}  // namespace assertforge::java
