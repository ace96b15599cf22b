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

// Recursive-descent parser for the subset of Java that unit tests and the
// classes they exercise are written in: declarations of every type kind,
// generics, annotations, lambdas, method references, switch in both forms,
// try-with-resources and the full expression grammar. Ambiguities (casts,
// local declarations, lambdas) are resolved by bounded backtracking.

#include <algorithm>
#include <string>
#include <utility>

#include "assertforge/common.h"
#include "assertforge/java/syntax.h"

namespace assertforge::java {
namespace {

constexpr int kMaxDepth = 1500;

bool IsPrimitive(std::string_view t) {
  return t == "boolean" || t == "byte" || t == "char" || t == "short" ||
         t == "int" || t == "long" || t == "float" || t == "double";
}

bool IsModifierKeyword(std::string_view t) {
  return t == "public" || t == "protected" || t == "private" ||
         t == "static" || t == "final" || t == "abstract" || t == "native" ||
         t == "synchronized" || t == "transient" || t == "volatile" ||
         t == "strictfp" || t == "default";
}

struct Modifiers {
  std::vector<int> annotations;
  bool is_static = false;
  std::size_t begin = 0;       // first token of the modifier list
  std::size_t text_begin = 0;  // first token after leading annotations
  bool seen_non_annotation = false;
};

class Parser {
 public:
  Parser(const std::string& source, LexResult lexed)
      : src_(source), toks_(std::move(lexed.tokens)) {}

  std::vector<Node> TakeNodes() { return std::move(nodes_); }

  int ParseUnit() {
    const int root = NewNode(NodeKind::kCompilationUnit);
    nodes_[root].begin = 0;
    // Package annotations are legal in package-info.java.
    std::size_t save = p_;
    Modifiers leading = ParseModifiers();
    if (Is("package")) {
      Advance();
      QualifiedName();
      Expect(";");
    } else {
      p_ = save;
      nodes_.resize(static_cast<std::size_t>(root) + 1);
    }
    (void)leading;
    while (Is("import")) {
      Advance();
      if (Is("static")) Advance();
      ExpectIdent();
      while (Is(".")) {
        Advance();
        if (Is("*")) {
          Advance();
          break;
        }
        ExpectIdent();
      }
      Expect(";");
    }
    while (!AtEnd()) {
      if (Is(";")) {
        Advance();
        continue;
      }
      Modifiers mods = ParseModifiers();
      AddChild(root, TypeDeclaration(mods));
    }
    nodes_[root].end = src_.size();
    return root;
  }

  int ParseSingleMember() {
    const int root = NewNode(NodeKind::kTypeDecl);
    nodes_[root].begin = 0;
    Member(root, "");
    if (!AtEnd()) Fail("unexpected trailing input");
    nodes_[root].end = src_.size();
    return root;
  }

  int ParseSingleStatement() {
    const int root = BlockStatement();
    if (!AtEnd()) Fail("unexpected trailing input");
    return root;
  }

  int ParseSingleExpression() {
    const int root = Expression();
    if (!AtEnd()) Fail("unexpected trailing input");
    return root;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& Cur() const { return toks_[p_]; }
  const Token& PeekTok(std::size_t k) const {
    return toks_[std::min(p_ + k, toks_.size() - 1)];
  }
  bool AtEnd() const { return Cur().kind == TokenKind::kEnd; }
  bool Is(std::string_view text) const {
    const Token& t = Cur();
    return (t.kind == TokenKind::kOperator || t.kind == TokenKind::kKeyword) &&
           t.text == text;
  }
  bool IsAt(std::size_t k, std::string_view text) const {
    const Token& t = PeekTok(k);
    return (t.kind == TokenKind::kOperator || t.kind == TokenKind::kKeyword) &&
           t.text == text;
  }
  bool IsIdent() const { return Cur().kind == TokenKind::kIdentifier; }
  bool IsIdentAt(std::size_t k) const {
    return PeekTok(k).kind == TokenKind::kIdentifier;
  }
  bool IsContextual(std::string_view word) const {
    return IsIdent() && Cur().text == word;
  }
  // Tokens k and k+1 touch with no whitespace between them.
  bool Adjacent(std::size_t k) const {
    return PeekTok(k).end == PeekTok(k + 1).begin;
  }

  const Token& Advance() {
    const Token& t = toks_[p_];
    prev_end_ = t.end;
    if (p_ + 1 < toks_.size()) ++p_;
    return t;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    const Token& t = Cur();
    const std::string found =
        t.kind == TokenKind::kEnd ? "end of input" : "'" + std::string(t.text) + "'";
    throw ParseError(what + " at offset " + std::to_string(t.begin) +
                         " (found " + found + ")",
                     t.begin);
  }

  void Expect(std::string_view text) {
    if (!Is(text)) Fail("expected '" + std::string(text) + "'");
    Advance();
  }

  const Token& ExpectIdent() {
    if (!IsIdent()) Fail("expected identifier");
    return Advance();
  }

  int NewNode(NodeKind kind) {
    Node n;
    n.kind = kind;
    n.begin = Cur().begin;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int Finish(int id) {
    nodes_[id].end = std::max(prev_end_, nodes_[id].begin);
    return id;
  }
  void AddChild(int parent, int child) {
    if (child >= 0) nodes_[parent].children.push_back(child);
  }

  struct Mark {
    std::size_t p;
    std::size_t nodes;
    std::size_t prev_end;
  };
  Mark Save() const { return {p_, nodes_.size(), prev_end_}; }
  void Restore(const Mark& m) {
    p_ = m.p;
    nodes_.resize(m.nodes);
    prev_end_ = m.prev_end;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser* parser) : parser(parser) {
      if (++parser->depth_ > kMaxDepth) parser->Fail("nesting too deep");
    }
    ~DepthGuard() { --parser->depth_; }
    Parser* parser;
  };

  // ---- names, types, annotations -------------------------------------------

  std::string QualifiedName() {
    std::string name(ExpectIdent().text);
    while (Is(".") && IsIdentAt(1)) {
      Advance();
      name += ".";
      name += ExpectIdent().text;
    }
    return name;
  }

  int Annotation() {
    const int id = NewNode(NodeKind::kAnnotation);
    Expect("@");
    nodes_[id].name = QualifiedName();
    if (Is("(")) {
      Advance();
      if (!Is(")")) {
        if (IsIdent() && IsAt(1, "=")) {
          while (true) {
            ExpectIdent();
            Expect("=");
            AddChild(id, ElementValue());
            if (!Is(",")) break;
            Advance();
          }
        } else {
          AddChild(id, ElementValue());
        }
      }
      Expect(")");
    }
    return Finish(id);
  }

  int ElementValue() {
    DepthGuard guard(this);
    if (Is("@")) return Annotation();
    if (Is("{")) {
      const int id = NewNode(NodeKind::kArrayInit);
      Advance();
      while (!Is("}")) {
        AddChild(id, ElementValue());
        if (!Is(",")) break;
        Advance();
      }
      Expect("}");
      return Finish(id);
    }
    return Conditional();
  }

  Modifiers ParseModifiers() {
    Modifiers mods;
    mods.begin = Cur().begin;
    mods.text_begin = Cur().begin;
    while (true) {
      if (Is("@") && !IsAt(1, "interface")) {
        const int a = Annotation();
        mods.annotations.push_back(a);
        if (!mods.seen_non_annotation) mods.text_begin = Cur().begin;
      } else if (Cur().kind == TokenKind::kKeyword &&
                 IsModifierKeyword(Cur().text) &&
                 !(Is("default") && (IsAt(1, ":") || IsAt(1, "->")))) {
        if (Is("static")) mods.is_static = true;
        mods.seen_non_annotation = true;
        Advance();
      } else if (IsContextual("sealed") && !IsAt(1, "=") && !IsAt(1, "(") &&
                 !IsAt(1, ";") && !IsAt(1, ".")) {
        mods.seen_non_annotation = true;
        Advance();
      } else if (IsContextual("non") && IsAt(1, "-") &&
                 PeekTok(2).text == "sealed") {
        mods.seen_non_annotation = true;
        Advance();
        Advance();
        Advance();
      } else {
        break;
      }
    }
    return mods;
  }

  void SkipTypeAnnotations() {
    while (Is("@") && !IsAt(1, "interface")) Annotation();
  }

  void TypeArguments() {
    Expect("<");
    if (Is(">")) {  // diamond
      Advance();
      return;
    }
    while (true) {
      SkipTypeAnnotations();
      if (Is("?")) {
        Advance();
        if (Is("extends") || Is("super")) {
          Advance();
          Type(false);
        }
      } else {
        Type(false);
      }
      if (!Is(",")) break;
      Advance();
    }
    Expect(">");
  }

  void TypeParameters() {
    Expect("<");
    while (true) {
      SkipTypeAnnotations();
      ExpectIdent();
      if (Is("extends")) {
        Advance();
        Type(false);
        while (Is("&")) {
          Advance();
          Type(false);
        }
      }
      if (!Is(",")) break;
      Advance();
    }
    Expect(">");
  }

  void Dims() {
    while (true) {
      SkipTypeAnnotations();
      if (Is("[") && IsAt(1, "]")) {
        Advance();
        Advance();
      } else {
        break;
      }
    }
  }

  // Returns a kTypeRef node. `allow_void` admits method return types.
  int Type(bool allow_void) {
    DepthGuard guard(this);
    SkipTypeAnnotations();
    const int id = NewNode(NodeKind::kTypeRef);
    const std::size_t begin = Cur().begin;
    if (Cur().kind == TokenKind::kKeyword &&
        (IsPrimitive(Cur().text) || (allow_void && Is("void")))) {
      Advance();
    } else {
      ExpectIdent();
      if (Is("<")) TypeArguments();
      while (Is(".") && (IsIdentAt(1) || IsAt(1, "@"))) {
        Advance();
        SkipTypeAnnotations();
        ExpectIdent();
        if (Is("<")) TypeArguments();
      }
    }
    Dims();
    Finish(id);
    nodes_[id].begin = begin;
    std::string name;
    for (char c : src_.substr(begin, nodes_[id].end - begin)) {
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') name.push_back(c);
    }
    nodes_[id].name = std::move(name);
    return id;
  }

  // ---- declarations --------------------------------------------------------

  int TypeDeclaration(const Modifiers& mods) {
    DepthGuard guard(this);
    const int id = NewNode(NodeKind::kTypeDecl);
    nodes_[id].begin = mods.begin;
    nodes_[id].is_static = mods.is_static;
    for (int a : mods.annotations) AddChild(id, a);
    std::string kind;
    if (Is("@") && IsAt(1, "interface")) {
      Advance();
      Advance();
      kind = "@interface";
    } else if (Is("class") || Is("interface") || Is("enum")) {
      kind = std::string(Advance().text);
    } else if (IsContextual("record") && IsIdentAt(1)) {
      Advance();
      kind = "record";
    } else {
      Fail("expected type declaration");
    }
    const Token& name = ExpectIdent();
    nodes_[id].name = std::string(name.text);
    nodes_[id].name_pos = name.begin;
    if (Is("<")) TypeParameters();
    if (kind == "record") {
      Expect("(");
      while (!Is(")")) {
        AddChild(id, FormalParameter());
        if (!Is(",")) break;
        Advance();
      }
      Expect(")");
    }
    if (Is("extends")) {
      Advance();
      Type(false);
      while (Is(",")) {
        Advance();
        Type(false);
      }
    }
    if (Is("implements")) {
      Advance();
      Type(false);
      while (Is(",")) {
        Advance();
        Type(false);
      }
    }
    if (IsContextual("permits")) {
      Advance();
      Type(false);
      while (Is(",")) {
        Advance();
        Type(false);
      }
    }
    if (kind == "enum") {
      EnumBody(id);
    } else {
      ClassBody(id);
    }
    return Finish(id);
  }

  void ClassBody(int owner) {
    Expect("{");
    const std::string class_name = nodes_[owner].name;
    while (!Is("}")) {
      if (AtEnd()) Fail("expected '}'");
      Member(owner, class_name);
    }
    Expect("}");
  }

  void EnumBody(int owner) {
    Expect("{");
    while (!Is(";") && !Is("}")) {
      Modifiers mods = ParseModifiers();
      const int c = NewNode(NodeKind::kEnumConstant);
      nodes_[c].begin = mods.begin;
      const Token& name = ExpectIdent();
      nodes_[c].name = std::string(name.text);
      nodes_[c].name_pos = name.begin;
      nodes_[c].is_static = true;
      if (Is("(")) {
        for (int a : Arguments()) AddChild(c, a);
      }
      if (Is("{")) {
        const int body = NewNode(NodeKind::kTypeDecl);
        ClassBody(body);
        AddChild(c, Finish(body));
      }
      AddChild(owner, Finish(c));
      if (!Is(",")) break;
      Advance();
    }
    if (Is(";")) {
      Advance();
      const std::string class_name = nodes_[owner].name;
      while (!Is("}")) {
        if (AtEnd()) Fail("expected '}'");
        Member(owner, class_name);
      }
    }
    Expect("}");
  }

  void Member(int owner, const std::string& class_name) {
    DepthGuard guard(this);
    if (Is(";")) {
      Advance();
      return;
    }
    Modifiers mods = ParseModifiers();
    if (Is("{")) {
      const int id = NewNode(NodeKind::kInitializer);
      nodes_[id].begin = mods.begin;
      nodes_[id].is_static = mods.is_static;
      AddChild(id, Block());
      AddChild(owner, Finish(id));
      return;
    }
    if (Is("class") || Is("interface") || Is("enum") ||
        (Is("@") && IsAt(1, "interface")) ||
        (IsContextual("record") && IsIdentAt(1) &&
         (IsAt(2, "(") || IsAt(2, "<")))) {
      AddChild(owner, TypeDeclaration(mods));
      return;
    }
    if (Is("<")) TypeParameters();
    // Constructor: a name directly followed by a parameter list. Record
    // compact constructors omit the list.
    if (IsIdent() && (IsAt(1, "(") ||
                      (IsAt(1, "{") && Cur().text == class_name))) {
      const int id = NewNode(NodeKind::kConstructor);
      FillCallable(id, mods);
      const Token& name = Advance();
      nodes_[id].name = std::string(name.text);
      nodes_[id].name_pos = name.begin;
      if (Is("(")) FormalParameters(id);
      Throws();
      AddChild(id, Block());
      AddChild(owner, Finish(id));
      return;
    }
    const int type = Type(true);
    if (IsIdent() && IsAt(1, "(")) {
      const int id = NewNode(NodeKind::kMethod);
      FillCallable(id, mods);
      AddChild(id, type);
      const Token& name = Advance();
      nodes_[id].name = std::string(name.text);
      nodes_[id].name_pos = name.begin;
      FormalParameters(id);
      Dims();
      Throws();
      if (Is("default")) {  // annotation element default
        Advance();
        AddChild(id, ElementValue());
        Expect(";");
      } else if (Is(";")) {
        Advance();
      } else {
        AddChild(id, Block());
      }
      AddChild(owner, Finish(id));
      return;
    }
    if (nodes_[type].name == "void") Fail("expected method name");
    const int id = NewNode(NodeKind::kField);
    nodes_[id].begin = mods.begin;
    nodes_[id].is_static = mods.is_static;
    for (int a : mods.annotations) AddChild(id, a);
    AddChild(id, type);
    VariableDeclarators(id);
    Expect(";");
    AddChild(owner, Finish(id));
  }

  void FillCallable(int id, const Modifiers& mods) {
    nodes_[id].begin = mods.begin;
    nodes_[id].decl_begin = mods.text_begin;
    nodes_[id].is_static = mods.is_static;
    for (int a : mods.annotations) AddChild(id, a);
  }

  void Throws() {
    if (!Is("throws")) return;
    Advance();
    Type(false);
    while (Is(",")) {
      Advance();
      Type(false);
    }
  }

  void FormalParameters(int owner) {
    Expect("(");
    while (!Is(")")) {
      // Receiver parameter: `Outer this`.
      AddChild(owner, FormalParameter());
      if (!Is(",")) break;
      Advance();
    }
    Expect(")");
  }

  int FormalParameter() {
    Modifiers mods = ParseModifiers();
    const int id = NewNode(NodeKind::kParam);
    nodes_[id].begin = mods.begin;
    AddChild(id, Type(false));
    SkipTypeAnnotations();
    if (Is("...")) Advance();
    if (Is("this")) {
      const Token& t = Advance();
      nodes_[id].name = "this";
      nodes_[id].name_pos = t.begin;
    } else {
      const Token& name = ExpectIdent();
      nodes_[id].name = std::string(name.text);
      nodes_[id].name_pos = name.begin;
    }
    Dims();
    return Finish(id);
  }

  void VariableDeclarators(int owner) {
    while (true) {
      const int d = NewNode(NodeKind::kDeclarator);
      const Token& name = ExpectIdent();
      nodes_[d].name = std::string(name.text);
      nodes_[d].name_pos = name.begin;
      Dims();
      if (Is("=")) {
        Advance();
        AddChild(d, VariableInitializer());
      }
      AddChild(owner, Finish(d));
      if (!Is(",")) break;
      Advance();
    }
  }

  int VariableInitializer() {
    if (Is("{")) return ArrayInitializer();
    return Expression();
  }

  int ArrayInitializer() {
    DepthGuard guard(this);
    const int id = NewNode(NodeKind::kArrayInit);
    Expect("{");
    while (!Is("}")) {
      AddChild(id, VariableInitializer());
      if (!Is(",")) break;
      Advance();
    }
    Expect("}");
    return Finish(id);
  }

  // ---- statements ----------------------------------------------------------

  int Block() {
    DepthGuard guard(this);
    const int id = NewNode(NodeKind::kBlock);
    Expect("{");
    while (!Is("}")) {
      if (AtEnd()) Fail("expected '}'");
      AddChild(id, BlockStatement());
    }
    Expect("}");
    return Finish(id);
  }

  bool LooksLikeLocalType() const {
    std::size_t k = 0;
    while (PeekTok(k).kind == TokenKind::kKeyword &&
           (PeekTok(k).text == "final" || PeekTok(k).text == "abstract" ||
            PeekTok(k).text == "static" || PeekTok(k).text == "strictfp")) {
      ++k;
    }
    if (IsAt(k, "class") || IsAt(k, "interface") || IsAt(k, "enum")) {
      return true;
    }
    const Token& t = PeekTok(k);
    return t.kind == TokenKind::kIdentifier && t.text == "record" &&
           IsIdentAt(k + 1) && (IsAt(k + 2, "(") || IsAt(k + 2, "<"));
  }

  // Attempts `[final|@A] Type name (=|,|;|[|:)`. Leaves the cursor at the
  // first declarator on success.
  bool TryLocalVarHead(int* type_out, Modifiers* mods_out) {
    const Token& t = Cur();
    const bool plausible =
        t.kind == TokenKind::kIdentifier || Is("final") || Is("@") ||
        (t.kind == TokenKind::kKeyword && IsPrimitive(t.text));
    if (!plausible) return false;
    const Mark mark = Save();
    try {
      Modifiers mods = ParseModifiers();
      const int type = Type(false);
      if (IsIdent() && (IsAt(1, "=") || IsAt(1, ",") || IsAt(1, ";") ||
                        IsAt(1, "[") || IsAt(1, ":"))) {
        *type_out = type;
        *mods_out = std::move(mods);
        return true;
      }
    } catch (const ParseError&) {
    }
    Restore(mark);
    return false;
  }

  int BlockStatement() {
    DepthGuard guard(this);
    if (LooksLikeLocalType()) {
      const int id = NewNode(NodeKind::kLocalType);
      Modifiers mods = ParseModifiers();
      AddChild(id, TypeDeclaration(mods));
      return Finish(id);
    }
    const std::size_t begin = Cur().begin;
    int type = -1;
    Modifiers mods;
    if (TryLocalVarHead(&type, &mods)) {
      const int id = NewNode(NodeKind::kLocalVar);
      nodes_[id].begin = begin;
      for (int a : mods.annotations) AddChild(id, a);
      AddChild(id, type);
      VariableDeclarators(id);
      Expect(";");
      return Finish(id);
    }
    return Statement();
  }

  int Statement() {
    DepthGuard guard(this);
    if (Is("{")) return Block();
    if (Is(";")) {
      const int id = NewNode(NodeKind::kEmpty);
      Advance();
      return Finish(id);
    }
    if (Is("if")) {
      const int id = NewNode(NodeKind::kIf);
      Advance();
      AddChild(id, ParExpression());
      AddChild(id, Statement());
      if (Is("else")) {
        Advance();
        AddChild(id, Statement());
      }
      return Finish(id);
    }
    if (Is("while")) {
      const int id = NewNode(NodeKind::kWhile);
      Advance();
      AddChild(id, ParExpression());
      AddChild(id, Statement());
      return Finish(id);
    }
    if (Is("do")) {
      const int id = NewNode(NodeKind::kDoWhile);
      Advance();
      AddChild(id, Statement());
      Expect("while");
      AddChild(id, ParExpression());
      Expect(";");
      return Finish(id);
    }
    if (Is("for")) return ForStatement();
    if (Is("try")) return TryStatement();
    if (Is("switch")) return SwitchConstruct(NodeKind::kSwitch);
    if (Is("return")) {
      const int id = NewNode(NodeKind::kReturn);
      Advance();
      if (!Is(";")) AddChild(id, Expression());
      Expect(";");
      return Finish(id);
    }
    if (Is("throw")) {
      const int id = NewNode(NodeKind::kThrow);
      Advance();
      AddChild(id, Expression());
      Expect(";");
      return Finish(id);
    }
    if (Is("break") || Is("continue")) {
      const int id =
          NewNode(Is("break") ? NodeKind::kBreak : NodeKind::kContinue);
      Advance();
      if (IsIdent()) nodes_[id].name = std::string(Advance().text);
      Expect(";");
      return Finish(id);
    }
    if (Is("synchronized")) {
      const int id = NewNode(NodeKind::kSynchronized);
      Advance();
      AddChild(id, ParExpression());
      AddChild(id, Block());
      return Finish(id);
    }
    if (Is("assert")) {
      const int id = NewNode(NodeKind::kAssertKeyword);
      Advance();
      AddChild(id, Expression());
      if (Is(":")) {
        Advance();
        AddChild(id, Expression());
      }
      Expect(";");
      return Finish(id);
    }
    if (IsContextual("yield") && !IsAt(1, "=") && !IsAt(1, "(") &&
        !IsAt(1, ".") && !IsAt(1, "[") && !IsAt(1, "++") && !IsAt(1, "--") &&
        !IsAt(1, ";")) {
      const int id = NewNode(NodeKind::kYield);
      Advance();
      AddChild(id, Expression());
      Expect(";");
      return Finish(id);
    }
    if (IsIdent() && IsAt(1, ":") && !IsAt(1, "::")) {
      const int id = NewNode(NodeKind::kLabeled);
      nodes_[id].name = std::string(Advance().text);
      Advance();
      AddChild(id, Statement());
      return Finish(id);
    }
    const int id = NewNode(NodeKind::kExprStmt);
    const int expr = Expression();
    if (!IsStatementExpression(nodes_[expr])) {
      throw ParseError("not a statement at offset " +
                           std::to_string(nodes_[expr].begin),
                       nodes_[expr].begin);
    }
    AddChild(id, expr);
    Expect(";");
    return Finish(id);
  }

  int ParExpression() {
    Expect("(");
    const int e = Expression();
    Expect(")");
    return e;
  }

  int ForStatement() {
    const int begin_mark = NewNode(NodeKind::kFor);
    Expect("for");
    Expect("(");
    // Enhanced for: [mods] Type name ':' expr
    {
      const Mark mark = Save();
      try {
        Modifiers mods = ParseModifiers();
        const int param = NewNode(NodeKind::kParam);
        nodes_[param].begin = mods.begin;
        AddChild(param, Type(false));
        const Token& name = ExpectIdent();
        nodes_[param].name = std::string(name.text);
        nodes_[param].name_pos = name.begin;
        Dims();
        Finish(param);
        if (Is(":")) {
          Advance();
          nodes_[begin_mark].kind = NodeKind::kForEach;
          AddChild(begin_mark, param);
          AddChild(begin_mark, Expression());
          Expect(")");
          AddChild(begin_mark, Statement());
          return Finish(begin_mark);
        }
      } catch (const ParseError&) {
      }
      Restore(mark);
    }
    if (!Is(";")) {
      int type = -1;
      Modifiers mods;
      const std::size_t begin = Cur().begin;
      if (TryLocalVarHead(&type, &mods)) {
        const int decl = NewNode(NodeKind::kLocalVar);
        nodes_[decl].begin = begin;
        AddChild(decl, type);
        VariableDeclarators(decl);
        AddChild(begin_mark, Finish(decl));
      } else {
        ExpressionList(begin_mark);
      }
    }
    Expect(";");
    if (!Is(";")) AddChild(begin_mark, Expression());
    Expect(";");
    if (!Is(")")) ExpressionList(begin_mark);
    Expect(")");
    AddChild(begin_mark, Statement());
    return Finish(begin_mark);
  }

  void ExpressionList(int owner) {
    while (true) {
      const int id = NewNode(NodeKind::kExprStmt);
      const int e = Expression();
      if (!IsStatementExpression(nodes_[e])) Fail("not a statement");
      AddChild(id, e);
      AddChild(owner, Finish(id));
      if (!Is(",")) break;
      Advance();
    }
  }

  int TryStatement() {
    const int id = NewNode(NodeKind::kTry);
    Expect("try");
    bool has_resources = false;
    if (Is("(")) {
      has_resources = true;
      Advance();
      while (!Is(")")) {
        const int res = NewNode(NodeKind::kResource);
        int type = -1;
        Modifiers mods;
        if (TryLocalVarHead(&type, &mods)) {
          AddChild(res, type);
          const int d = NewNode(NodeKind::kDeclarator);
          const Token& name = ExpectIdent();
          nodes_[d].name = std::string(name.text);
          nodes_[d].name_pos = name.begin;
          Expect("=");
          AddChild(d, Expression());
          AddChild(res, Finish(d));
        } else {
          AddChild(res, Expression());
        }
        AddChild(id, Finish(res));
        if (!Is(";")) break;
        Advance();
      }
      Expect(")");
    }
    AddChild(id, Block());
    bool handlers = false;
    while (Is("catch")) {
      handlers = true;
      const int c = NewNode(NodeKind::kCatch);
      Advance();
      Expect("(");
      Modifiers mods = ParseModifiers();
      const int param = NewNode(NodeKind::kParam);
      nodes_[param].begin = mods.begin;
      AddChild(param, Type(false));
      while (Is("|")) {
        Advance();
        AddChild(param, Type(false));
      }
      const Token& name = ExpectIdent();
      nodes_[param].name = std::string(name.text);
      nodes_[param].name_pos = name.begin;
      AddChild(c, Finish(param));
      Expect(")");
      AddChild(c, Block());
      AddChild(id, Finish(c));
    }
    if (Is("finally")) {
      handlers = true;
      const int f = NewNode(NodeKind::kFinally);
      Advance();
      AddChild(f, Block());
      AddChild(id, Finish(f));
    }
    if (!handlers && !has_resources) Fail("expected 'catch' or 'finally'");
    return Finish(id);
  }

  int SwitchConstruct(NodeKind kind) {
    const int id = NewNode(kind);
    Expect("switch");
    AddChild(id, ParExpression());
    Expect("{");
    while (!Is("}")) {
      const int c = NewNode(NodeKind::kSwitchCase);
      if (Is("default")) {
        Advance();
        nodes_[c].name = "default";
      } else {
        Expect("case");
        nodes_[c].name = "case";
        const bool saved = no_lambda_;
        no_lambda_ = true;
        while (true) {
          if (Is("default")) {
            Advance();
          } else {
            AddChild(c, Conditional());
          }
          if (!Is(",")) break;
          Advance();
        }
        no_lambda_ = saved;
      }
      if (Is("->")) {
        Advance();
        if (Is("{")) {
          AddChild(c, Block());
        } else if (Is("throw")) {
          AddChild(c, Statement());
        } else {
          const int s = NewNode(NodeKind::kExprStmt);
          AddChild(s, Expression());
          Expect(";");
          AddChild(c, Finish(s));
        }
      } else {
        Expect(":");
        while (!Is("case") && !Is("default") && !Is("}")) {
          if (AtEnd()) Fail("expected '}'");
          AddChild(c, BlockStatement());
        }
        // `default` used as a label only; a `default ->` arm starts a new case.
      }
      AddChild(id, Finish(c));
    }
    Expect("}");
    return Finish(id);
  }

  // ---- expressions ---------------------------------------------------------

  bool LambdaAhead() const {
    if (no_lambda_) return false;
    if (IsIdent() && IsAt(1, "->")) return true;
    if (!Is("(")) return false;
    int depth = 0;
    for (std::size_t k = 0; p_ + k < toks_.size(); ++k) {
      const Token& t = PeekTok(k);
      if (t.kind == TokenKind::kEnd) return false;
      if (t.kind == TokenKind::kOperator) {
        if (t.text == "(") ++depth;
        if (t.text == ")" && --depth == 0) return IsAt(k + 1, "->");
      }
    }
    return false;
  }

  int Lambda() {
    DepthGuard guard(this);
    const int id = NewNode(NodeKind::kLambda);
    if (IsIdent()) {
      const int param = NewNode(NodeKind::kParam);
      const Token& name = Advance();
      nodes_[param].name = std::string(name.text);
      nodes_[param].name_pos = name.begin;
      AddChild(id, Finish(param));
    } else {
      Expect("(");
      while (!Is(")")) {
        if (IsIdent() && (IsAt(1, ",") || IsAt(1, ")"))) {
          const int param = NewNode(NodeKind::kParam);
          const Token& name = Advance();
          nodes_[param].name = std::string(name.text);
          nodes_[param].name_pos = name.begin;
          AddChild(id, Finish(param));
        } else {
          AddChild(id, FormalParameter());
        }
        if (!Is(",")) break;
        Advance();
      }
      Expect(")");
    }
    Expect("->");
    const bool saved = no_lambda_;
    no_lambda_ = false;
    AddChild(id, Is("{") ? Block() : Expression());
    no_lambda_ = saved;
    return Finish(id);
  }

  // Returns the assignment operator at the cursor (joining split `>` tokens)
  // and its token count, or an empty string.
  std::pair<std::string, int> AssignmentOperator() const {
    const Token& t = Cur();
    if (t.kind != TokenKind::kOperator) return {"", 0};
    static const char* kSimple[] = {"=",  "+=", "-=", "*=", "/=", "%=",
                                    "&=", "|=", "^=", "<<="};
    for (const char* op : kSimple) {
      if (t.text == op) return {op, 1};
    }
    if (t.text == ">") {
      if (IsAt(1, ">") && Adjacent(0)) {
        if (IsAt(2, "=") && Adjacent(1)) return {">>=", 3};
        if (IsAt(2, ">") && Adjacent(1) && IsAt(3, "=") && Adjacent(2)) {
          return {">>>=", 4};
        }
      }
    }
    return {"", 0};
  }

  // Binary operator at the cursor with its precedence and token count.
  struct BinaryOp {
    std::string text;
    int precedence = -1;
    int tokens = 0;
  };

  BinaryOp CurrentBinaryOp() const {
    const Token& t = Cur();
    if (t.kind == TokenKind::kKeyword && t.text == "instanceof") {
      return {"instanceof", 7, 1};
    }
    if (t.kind != TokenKind::kOperator) return {};
    const std::string_view s = t.text;
    if (s == "||") return {"||", 1, 1};
    if (s == "&&") return {"&&", 2, 1};
    if (s == "|") return {"|", 3, 1};
    if (s == "^") return {"^", 4, 1};
    if (s == "&") return {"&", 5, 1};
    if (s == "==" || s == "!=") return {std::string(s), 6, 1};
    if (s == "<" || s == "<=") return {std::string(s), 7, 1};
    if (s == "<<") return {"<<", 8, 1};
    if (s == "+" || s == "-") return {std::string(s), 9, 1};
    if (s == "*" || s == "/" || s == "%") return {std::string(s), 10, 1};
    if (s == ">") {
      if (IsAt(1, "=") && Adjacent(0)) return {">=", 7, 2};
      if (IsAt(1, ">") && Adjacent(0)) {
        if (IsAt(2, ">") && Adjacent(1)) {
          if (IsAt(3, "=") && Adjacent(2)) return {};  // >>>=
          return {">>>", 8, 3};
        }
        if (IsAt(2, "=") && Adjacent(1)) return {};  // >>=
        return {">>", 8, 2};
      }
      return {">", 7, 1};
    }
    return {};
  }

  int Expression() {
    DepthGuard guard(this);
    if (LambdaAhead()) return Lambda();
    const int lhs = Conditional();
    auto [op, count] = AssignmentOperator();
    if (count == 0) return lhs;
    const NodeKind k = nodes_[lhs].kind;
    if (k != NodeKind::kName && k != NodeKind::kFieldAccess &&
        k != NodeKind::kIndex && k != NodeKind::kParens) {
      Fail("invalid assignment target");
    }
    for (int i = 0; i < count; ++i) Advance();
    const int id = NewNode(NodeKind::kAssign);
    nodes_[id].begin = nodes_[lhs].begin;
    nodes_[id].name = op;
    AddChild(id, lhs);
    AddChild(id, Expression());
    return Finish(id);
  }

  int Conditional() {
    DepthGuard guard(this);
    const int cond = Binary(1);
    if (!Is("?")) return cond;
    Advance();
    const int id = NewNode(NodeKind::kConditional);
    nodes_[id].begin = nodes_[cond].begin;
    AddChild(id, cond);
    const bool saved = no_lambda_;
    no_lambda_ = false;
    AddChild(id, Expression());
    no_lambda_ = saved;
    Expect(":");
    AddChild(id, LambdaAhead() ? Lambda() : Conditional());
    return Finish(id);
  }

  int Binary(int min_precedence) {
    DepthGuard guard(this);
    int left = Unary();
    while (true) {
      const BinaryOp op = CurrentBinaryOp();
      if (op.precedence < min_precedence || op.tokens == 0) break;
      for (int i = 0; i < op.tokens; ++i) Advance();
      if (op.text == "instanceof") {
        const int id = NewNode(NodeKind::kInstanceOf);
        nodes_[id].begin = nodes_[left].begin;
        AddChild(id, left);
        if (Is("final")) Advance();
        AddChild(id, Type(false));
        if (IsIdent() && !IsAt(1, "->")) {
          const int binding = NewNode(NodeKind::kParam);
          const Token& name = Advance();
          nodes_[binding].name = std::string(name.text);
          nodes_[binding].name_pos = name.begin;
          AddChild(id, Finish(binding));
        }
        left = Finish(id);
        continue;
      }
      const int right = Binary(op.precedence + 1);
      const int id = NewNode(NodeKind::kBinary);
      nodes_[id].begin = nodes_[left].begin;
      nodes_[id].name = op.text;
      AddChild(id, left);
      AddChild(id, right);
      left = Finish(id);
    }
    return left;
  }

  bool CastOperandAhead() const {
    const Token& t = Cur();
    switch (t.kind) {
      case TokenKind::kIdentifier:
      case TokenKind::kIntLiteral:
      case TokenKind::kFloatLiteral:
      case TokenKind::kCharLiteral:
      case TokenKind::kStringLiteral:
      case TokenKind::kTextBlock:
        return true;
      case TokenKind::kKeyword:
        return t.text == "this" || t.text == "super" || t.text == "new" ||
               t.text == "true" || t.text == "false" || t.text == "null" ||
               t.text == "switch" || IsPrimitive(t.text) || t.text == "void";
      case TokenKind::kOperator:
        return t.text == "(" || t.text == "!" || t.text == "~";
      default:
        return false;
    }
  }

  int Unary() {
    DepthGuard guard(this);
    if (Is("++") || Is("--") || Is("+") || Is("-") || Is("!") || Is("~")) {
      const int id = NewNode(NodeKind::kUnary);
      nodes_[id].name = std::string(Advance().text);
      AddChild(id, Unary());
      return Finish(id);
    }
    if (Is("(")) {
      const int cast = TryCast();
      if (cast >= 0) return cast;
    }
    return Postfix(Primary());
  }

  int TryCast() {
    const Token& next = PeekTok(1);
    const bool primitive =
        next.kind == TokenKind::kKeyword && IsPrimitive(next.text);
    if (!primitive && next.kind != TokenKind::kIdentifier && !IsAt(1, "@")) {
      return -1;
    }
    const Mark mark = Save();
    try {
      const int id = NewNode(NodeKind::kCast);
      Expect("(");
      AddChild(id, Type(false));
      while (!primitive && Is("&")) {
        Advance();
        AddChild(id, Type(false));
      }
      Expect(")");
      if (primitive) {
        AddChild(id, Unary());
        return Finish(id);
      }
      if (LambdaAhead()) {
        AddChild(id, Lambda());
        return Finish(id);
      }
      if (CastOperandAhead()) {
        AddChild(id, Unary());
        return Finish(id);
      }
    } catch (const ParseError&) {
    }
    Restore(mark);
    return -1;
  }

  int Postfix(int expr) {
    while (Is("++") || Is("--")) {
      const NodeKind k = nodes_[expr].kind;
      if (k != NodeKind::kName && k != NodeKind::kFieldAccess &&
          k != NodeKind::kIndex && k != NodeKind::kParens) {
        Fail("invalid increment target");
      }
      const int id = NewNode(NodeKind::kPostfix);
      nodes_[id].begin = nodes_[expr].begin;
      nodes_[id].name = std::string(Advance().text);
      AddChild(id, expr);
      expr = Finish(id);
    }
    return expr;
  }

  std::vector<int> Arguments() {
    std::vector<int> args;
    Expect("(");
    const bool saved = no_lambda_;
    no_lambda_ = false;
    while (!Is(")")) {
      args.push_back(Expression());
      if (!Is(",")) break;
      Advance();
    }
    no_lambda_ = saved;
    Expect(")");
    return args;
  }

  int MethodCall(int target, const Token& name) {
    const int id = NewNode(NodeKind::kMethodCall);
    nodes_[id].begin = target >= 0 ? nodes_[target].begin : name.begin;
    nodes_[id].name = std::string(name.text);
    nodes_[id].name_pos = name.begin;
    nodes_[id].has_target = target >= 0;
    if (target >= 0) AddChild(id, target);
    for (int a : Arguments()) AddChild(id, a);
    return Finish(id);
  }

  int Primary() {
    DepthGuard guard(this);
    const Token& t = Cur();
    int expr = -1;
    switch (t.kind) {
      case TokenKind::kIntLiteral:
      case TokenKind::kFloatLiteral:
      case TokenKind::kCharLiteral:
      case TokenKind::kStringLiteral:
      case TokenKind::kTextBlock: {
        expr = NewNode(NodeKind::kLiteral);
        nodes_[expr].name = std::string(Advance().text);
        Finish(expr);
        break;
      }
      case TokenKind::kIdentifier: {
        if (IsAt(1, "(")) {
          const Token& name = Advance();
          expr = MethodCall(-1, name);
        } else if (IsAt(1, "[") && IsAt(2, "]")) {
          // Array type in expression position: Foo[].class, Foo[]::new.
          const int type = Type(false);
          expr = TypeSuffix(type);
        } else {
          expr = NewNode(NodeKind::kName);
          const Token& name = Advance();
          nodes_[expr].name = std::string(name.text);
          nodes_[expr].name_pos = name.begin;
          Finish(expr);
        }
        break;
      }
      case TokenKind::kKeyword: {
        if (t.text == "true" || t.text == "false" || t.text == "null") {
          expr = NewNode(NodeKind::kLiteral);
          nodes_[expr].name = std::string(Advance().text);
          Finish(expr);
        } else if (t.text == "this" || t.text == "super") {
          if (IsAt(1, "(")) {
            const Token& name = Advance();
            expr = MethodCall(-1, name);
          } else {
            expr = NewNode(t.text == "this" ? NodeKind::kThis
                                            : NodeKind::kSuper);
            Advance();
            Finish(expr);
            if (nodes_[expr].kind == NodeKind::kSuper && !Is(".") &&
                !Is("::")) {
              Fail("expected '.' after 'super'");
            }
          }
        } else if (t.text == "new") {
          expr = Creator(-1);
        } else if (t.text == "switch") {
          expr = SwitchConstruct(NodeKind::kSwitchExpr);
        } else if (IsPrimitive(t.text) || t.text == "void") {
          const int type = Type(true);
          expr = TypeSuffix(type);
        } else {
          Fail("expected expression");
        }
        break;
      }
      case TokenKind::kOperator: {
        if (t.text == "(") {
          expr = NewNode(NodeKind::kParens);
          Advance();
          const bool saved = no_lambda_;
          no_lambda_ = false;
          AddChild(expr, Expression());
          no_lambda_ = saved;
          Expect(")");
          Finish(expr);
        } else {
          Fail("expected expression");
        }
        break;
      }
      default:
        Fail("expected expression");
    }
    return Selectors(expr);
  }

  // After a bare type: `.class` or `::new` / `::name`.
  int TypeSuffix(int type) {
    if (Is(".") && IsAt(1, "class")) {
      const int id = NewNode(NodeKind::kClassLiteral);
      nodes_[id].begin = nodes_[type].begin;
      Advance();
      Advance();
      AddChild(id, type);
      return Finish(id);
    }
    if (Is("::")) {
      Advance();
      const int id = NewNode(NodeKind::kMethodRef);
      nodes_[id].begin = nodes_[type].begin;
      AddChild(id, type);
      if (Is("new")) {
        nodes_[id].name = "new";
        Advance();
      } else {
        nodes_[id].name = std::string(ExpectIdent().text);
      }
      return Finish(id);
    }
    Fail("expected '.class' or '::'");
  }

  int Selectors(int expr) {
    while (true) {
      if (Is(".")) {
        if (IsAt(1, "new")) {
          Advance();
          expr = Creator(expr);
        } else if (IsAt(1, "<")) {
          Advance();
          TypeArguments();
          const Token& name = ExpectIdent();
          if (!Is("(")) Fail("expected '('");
          expr = MethodCall(expr, name);
        } else if (IsAt(1, "class")) {
          const int id = NewNode(NodeKind::kClassLiteral);
          nodes_[id].begin = nodes_[expr].begin;
          Advance();
          Advance();
          AddChild(id, expr);
          expr = Finish(id);
        } else if (IsAt(1, "this") || IsAt(1, "super")) {
          Advance();
          const int id = NewNode(NodeKind::kFieldAccess);
          nodes_[id].begin = nodes_[expr].begin;
          const Token& name = Advance();
          nodes_[id].name = std::string(name.text);
          nodes_[id].name_pos = name.begin;
          nodes_[id].has_target = true;
          AddChild(id, expr);
          expr = Finish(id);
        } else {
          Advance();
          const Token& name = ExpectIdent();
          if (Is("(")) {
            expr = MethodCall(expr, name);
          } else {
            const int id = NewNode(NodeKind::kFieldAccess);
            nodes_[id].begin = nodes_[expr].begin;
            nodes_[id].name = std::string(name.text);
            nodes_[id].name_pos = name.begin;
            nodes_[id].has_target = true;
            AddChild(id, expr);
            expr = Finish(id);
          }
        }
      } else if (Is("[")) {
        const int id = NewNode(NodeKind::kIndex);
        nodes_[id].begin = nodes_[expr].begin;
        Advance();
        AddChild(id, expr);
        AddChild(id, Expression());
        Expect("]");
        expr = Finish(id);
      } else if (Is("::")) {
        Advance();
        const int id = NewNode(NodeKind::kMethodRef);
        nodes_[id].begin = nodes_[expr].begin;
        AddChild(id, expr);
        if (Is("<")) TypeArguments();
        if (Is("new")) {
          nodes_[id].name = "new";
          Advance();
        } else {
          nodes_[id].name = std::string(ExpectIdent().text);
        }
        expr = Finish(id);
      } else {
        return expr;
      }
    }
  }

  int Creator(int outer) {
    DepthGuard guard(this);
    const int id = NewNode(NodeKind::kNew);
    if (outer >= 0) {
      nodes_[id].begin = nodes_[outer].begin;
      AddChild(id, outer);
    }
    Expect("new");
    if (Is("<")) TypeArguments();
    SkipTypeAnnotations();
    const std::size_t type_begin = Cur().begin;
    const int type = NewNode(NodeKind::kTypeRef);
    bool primitive = false;
    if (Cur().kind == TokenKind::kKeyword && IsPrimitive(Cur().text)) {
      primitive = true;
      Advance();
    } else {
      ExpectIdent();
      if (Is("<")) TypeArguments();
      while (Is(".")) {
        Advance();
        SkipTypeAnnotations();
        ExpectIdent();
        if (Is("<")) TypeArguments();
      }
    }
    Finish(type);
    nodes_[type].begin = type_begin;
    for (char c : src_.substr(type_begin, nodes_[type].end - type_begin)) {
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
        nodes_[type].name.push_back(c);
      }
    }
    nodes_[id].name = nodes_[type].name;
    AddChild(id, type);
    if (Is("[")) {
      nodes_[id].kind = NodeKind::kNewArray;
      bool sized = false;
      bool open_dim = false;
      while (Is("[")) {
        Advance();
        if (Is("]")) {
          Advance();
          open_dim = true;
        } else {
          if (open_dim) Fail("sized dimension after an unsized one");
          sized = true;
          AddChild(id, Expression());
          Expect("]");
        }
      }
      if (Is("{")) {
        if (sized) Fail("array initializer after sized dimensions");
        AddChild(id, ArrayInitializer());
      } else if (!sized) {
        Fail("array creation needs a size or initializer");
      }
      return Finish(id);
    }
    if (primitive) Fail("expected '['");
    for (int a : Arguments()) AddChild(id, a);
    if (Is("{")) {
      const int body = NewNode(NodeKind::kTypeDecl);
      ClassBody(body);
      AddChild(id, Finish(body));
    }
    return Finish(id);
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::vector<Node> nodes_;
  std::size_t p_ = 0;
  std::size_t prev_end_ = 0;
  int depth_ = 0;
  bool no_lambda_ = false;
};

template <typename Fn>
SyntaxTree RunParser(std::string source, Fn fn) {
  if (!IsValidUtf8(source)) {
    throw EncodingError("source is not valid UTF-8");
  }
  LexResult lexed = Lex(source);
  std::vector<CommentSpan> comments = lexed.comments;
  Parser parser(source, std::move(lexed));
  const int root = fn(parser);
  std::vector<Node> nodes = parser.TakeNodes();
  return SyntaxTree(std::move(source), std::move(nodes), std::move(comments),
                    root);
}

}  // namespace

const char* NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kCompilationUnit: return "CompilationUnit";
    case NodeKind::kTypeDecl: return "TypeDecl";
    case NodeKind::kMethod: return "Method";
    case NodeKind::kConstructor: return "Constructor";
    case NodeKind::kField: return "Field";
    case NodeKind::kInitializer: return "Initializer";
    case NodeKind::kParam: return "Param";
    case NodeKind::kAnnotation: return "Annotation";
    case NodeKind::kEnumConstant: return "EnumConstant";
    case NodeKind::kBlock: return "Block";
    case NodeKind::kLocalVar: return "LocalVar";
    case NodeKind::kDeclarator: return "Declarator";
    case NodeKind::kLocalType: return "LocalType";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kIf: return "If";
    case NodeKind::kWhile: return "While";
    case NodeKind::kDoWhile: return "DoWhile";
    case NodeKind::kFor: return "For";
    case NodeKind::kForEach: return "ForEach";
    case NodeKind::kTry: return "Try";
    case NodeKind::kResource: return "Resource";
    case NodeKind::kCatch: return "Catch";
    case NodeKind::kFinally: return "Finally";
    case NodeKind::kSwitch: return "Switch";
    case NodeKind::kSwitchCase: return "SwitchCase";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kThrow: return "Throw";
    case NodeKind::kBreak: return "Break";
    case NodeKind::kContinue: return "Continue";
    case NodeKind::kSynchronized: return "Synchronized";
    case NodeKind::kAssertKeyword: return "AssertKeyword";
    case NodeKind::kLabeled: return "Labeled";
    case NodeKind::kYield: return "Yield";
    case NodeKind::kEmpty: return "Empty";
    case NodeKind::kName: return "Name";
    case NodeKind::kFieldAccess: return "FieldAccess";
    case NodeKind::kMethodCall: return "MethodCall";
    case NodeKind::kNew: return "New";
    case NodeKind::kNewArray: return "NewArray";
    case NodeKind::kArrayInit: return "ArrayInit";
    case NodeKind::kLiteral: return "Literal";
    case NodeKind::kUnary: return "Unary";
    case NodeKind::kPostfix: return "Postfix";
    case NodeKind::kBinary: return "Binary";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kConditional: return "Conditional";
    case NodeKind::kCast: return "Cast";
    case NodeKind::kInstanceOf: return "InstanceOf";
    case NodeKind::kIndex: return "Index";
    case NodeKind::kLambda: return "Lambda";
    case NodeKind::kMethodRef: return "MethodRef";
    case NodeKind::kClassLiteral: return "ClassLiteral";
    case NodeKind::kThis: return "This";
    case NodeKind::kSuper: return "Super";
    case NodeKind::kParens: return "Parens";
    case NodeKind::kSwitchExpr: return "SwitchExpr";
    case NodeKind::kTypeRef: return "TypeRef";
  }
  return "?";
}

bool IsStatementExpression(const Node& node) {
  switch (node.kind) {
    case NodeKind::kAssign:
    case NodeKind::kMethodCall:
    case NodeKind::kNew:
    case NodeKind::kPostfix:
      return true;
    case NodeKind::kUnary:
      return node.name == "++" || node.name == "--";
    default:
      return false;
  }
}

std::string_view SyntaxTree::Text(int id) const {
  const Node& n = node(id);
  return std::string_view(source_).substr(n.begin, n.end - n.begin);
}

void SyntaxTree::Walk(int id, const std::function<bool(int)>& visit) const {
  std::vector<int> stack{id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (!visit(cur)) continue;
    const auto& kids = node(cur).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

std::string SyntaxTree::StructureSignature(int id) const {
  std::string out;
  std::vector<std::pair<int, bool>> stack{{id, false}};
  while (!stack.empty()) {
    auto [cur, closing] = stack.back();
    stack.pop_back();
    if (closing) {
      out += ")";
      continue;
    }
    const Node& n = node(cur);
    out += "(";
    out += NodeKindName(n.kind);
    if (!n.name.empty()) {
      out += ":";
      out += n.name;
    }
    stack.push_back({cur, true});
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.push_back({*it, false});
    }
  }
  return out;
}

SyntaxTree ParseCompilationUnit(std::string source) {
  return RunParser(std::move(source), [](Parser& p) { return p.ParseUnit(); });
}

SyntaxTree ParseMember(std::string source) {
  return RunParser(std::move(source),
                   [](Parser& p) { return p.ParseSingleMember(); });
}

SyntaxTree ParseStatement(std::string source) {
  return RunParser(std::move(source),
                   [](Parser& p) { return p.ParseSingleStatement(); });
}

SyntaxTree ParseExpression(std::string source) {
  return RunParser(std::move(source),
                   [](Parser& p) { return p.ParseSingleExpression(); });
}

}  // namespace assertforge::java
