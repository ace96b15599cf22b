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

#include "assertforge/mining.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "assertforge/parallel.h"
#include "assertforge/random.h"
#include "json.hpp"

namespace assertforge::mining {
namespace {

using java::Node;
using java::NodeKind;
using java::SyntaxTree;

constexpr std::string_view kAssertNames[] = {
    "assertEquals", "assertTrue",    "assertFalse",      "assertNull",
    "assertNotNull", "assertSame",   "assertNotSame",    "assertThat",
    "assertArrayEquals", "fail",
};

std::string SimpleName(std::string_view qualified) {
  const std::size_t dot = qualified.rfind('.');
  return std::string(dot == std::string_view::npos ? qualified
                                                   : qualified.substr(dot + 1));
}

// Copy of the source with every comment replaced by spaces, newlines kept.
std::string BlankComments(const SyntaxTree& tree) {
  std::string out = tree.source();
  for (const java::CommentSpan& c : tree.comments()) {
    for (std::size_t i = c.begin; i < c.end && i < out.size(); ++i) {
      if (out[i] != '\n') out[i] = ' ';
    }
  }
  return out;
}

// Dotted name of a Name / FieldAccess chain, or empty for anything else.
std::string DottedName(const SyntaxTree& tree, int id) {
  const Node& n = tree.node(id);
  if (n.kind == NodeKind::kName) return n.name;
  if (n.kind == NodeKind::kFieldAccess && n.has_target) {
    const std::string head = DottedName(tree, n.children.front());
    return head.empty() ? std::string() : head + "." + n.name;
  }
  return {};
}

void CollectAsserts(const SyntaxTree& tree, int body,
                    std::vector<AssertSite>* out) {
  tree.Walk(body, [&](int id) {
    const Node& n = tree.node(id);
    if (n.kind == NodeKind::kTypeDecl || n.kind == NodeKind::kLambda) {
      return false;
    }
    if (n.kind == NodeKind::kExprStmt && !n.children.empty()) {
      const int expr = n.children.front();
      if (IsAssertCall(tree, expr)) {
        AssertSite site;
        site.statement = {n.begin, n.end};
        site.expression = {tree.node(expr).begin, tree.node(expr).end};
        site.call_name = tree.node(expr).name;
        out->push_back(std::move(site));
      }
      return false;
    }
    return true;
  });
}

void CollectInvocations(const SyntaxTree& tree, int body,
                        std::vector<Invocation>* out) {
  tree.Walk(body, [&](int id) {
    const Node& n = tree.node(id);
    if (n.kind == NodeKind::kMethodCall) {
      Invocation inv;
      inv.name = n.name;
      inv.position = n.name_pos;
      inv.arg_count = static_cast<int>(n.children.size()) - (n.has_target ? 1 : 0);
      if (n.has_target) {
        inv.receiver =
            NormalizeWhitespace(tree.Text(n.children.front()));
      }
      out->push_back(std::move(inv));
    }
    return true;
  });
  std::stable_sort(out->begin(), out->end(),
                   [](const Invocation& a, const Invocation& b) {
                     return a.position < b.position;
                   });
}

JavaMethod BuildMethod(const SyntaxTree& tree, const std::string& blanked,
                       int id, const std::string& class_name) {
  const Node& n = tree.node(id);
  JavaMethod m;
  m.name = n.name;
  m.class_name = class_name;
  m.is_static = n.is_static;
  m.is_constructor = n.kind == NodeKind::kConstructor;
  m.span = {n.begin, n.end};
  m.text_span = {std::max(n.decl_begin, n.begin), n.end};
  m.text = blanked.substr(m.text_span.begin, m.text_span.end - m.text_span.begin);
  for (int c : n.children) {
    const Node& child = tree.node(c);
    if (child.kind == NodeKind::kAnnotation) {
      m.annotations.push_back(SimpleName(child.name));
    } else if (child.kind == NodeKind::kBlock) {
      m.body_span = {child.begin, child.end};
      m.body_text = blanked.substr(child.begin, child.end - child.begin);
      CollectInvocations(tree, c, &m.invocations);
      CollectAsserts(tree, c, &m.asserts);
    }
  }
  return m;
}

void CollectFromType(const SyntaxTree& tree, const std::string& blanked,
                     int id, std::vector<JavaClass>* out) {
  const Node& type = tree.node(id);
  JavaClass cls;
  cls.name = type.name;
  std::vector<int> nested;
  for (int c : type.children) {
    const Node& member = tree.node(c);
    switch (member.kind) {
      case NodeKind::kMethod:
      case NodeKind::kConstructor:
        cls.methods.push_back(BuildMethod(tree, blanked, c, cls.name));
        break;
      case NodeKind::kField:
        if (member.is_static) {
          for (int d : member.children) {
            if (tree.node(d).kind == NodeKind::kDeclarator) {
              cls.static_fields.push_back(tree.node(d).name);
            }
          }
        }
        break;
      case NodeKind::kEnumConstant:
        cls.static_fields.push_back(member.name);
        break;
      case NodeKind::kTypeDecl:
        nested.push_back(c);
        break;
      default:
        break;
    }
  }
  out->push_back(std::move(cls));
  for (int c : nested) CollectFromType(tree, blanked, c, out);
}

}  // namespace

bool JavaMethod::HasAnnotation(std::string_view simple_name) const {
  return std::find(annotations.begin(), annotations.end(), simple_name) !=
         annotations.end();
}

bool IsAssertCallName(std::string_view name) {
  return std::find(std::begin(kAssertNames), std::end(kAssertNames), name) !=
         std::end(kAssertNames);
}

bool IsAssertCall(const SyntaxTree& tree, int call) {
  const Node& n = tree.node(call);
  if (n.kind != NodeKind::kMethodCall || !IsAssertCallName(n.name)) {
    return false;
  }
  if (!n.has_target) return true;
  const std::string receiver = DottedName(tree, n.children.front());
  const std::string last = SimpleName(receiver);
  return !receiver.empty() && (last == "Assert" || last == "Assertions");
}

std::vector<JavaClass> CollectClasses(const SyntaxTree& tree) {
  const std::string blanked = BlankComments(tree);
  std::vector<JavaClass> classes;
  const Node& root = tree.node(tree.root());
  if (root.kind == NodeKind::kCompilationUnit) {
    for (int c : root.children) {
      if (tree.node(c).kind == NodeKind::kTypeDecl) {
        CollectFromType(tree, blanked, c, &classes);
      }
    }
  } else if (root.kind == NodeKind::kTypeDecl) {
    CollectFromType(tree, blanked, tree.root(), &classes);
  }
  return classes;
}

std::vector<JavaClass> ParseJava(std::string_view source) {
  return CollectClasses(java::ParseCompilationUnit(std::string(source)));
}

std::vector<JavaMethod> ExtractCandidates(
    const std::vector<JavaMethod>& methods) {
  std::vector<JavaMethod> out;
  for (const JavaMethod& m : methods) {
    if (m.HasAnnotation("Test") && m.asserts.size() == 1) out.push_back(m);
  }
  return out;
}

std::string FocalClassFor(std::string_view test_class) {
  std::string_view name = test_class;
  if (name.size() > 4 && name.substr(name.size() - 4) == "Test") {
    return std::string(name.substr(0, name.size() - 4));
  }
  if (name.size() > 4 && name.substr(0, 4) == "Test") {
    return std::string(name.substr(4));
  }
  return std::string(name);
}

void FocalIndex::Add(const JavaMethod& method, const std::string& path) {
  entries_[method.name].push_back(
      Entry{std::make_shared<const JavaMethod>(method), path, next_order_++});
}

void FocalIndex::AddClasses(const std::vector<JavaClass>& classes,
                            const std::string& path, bool skip_tests) {
  for (const JavaClass& cls : classes) {
    for (const JavaMethod& m : cls.methods) {
      if (skip_tests && m.HasAnnotation("Test")) continue;
      Add(m, path);
    }
  }
}

void FocalIndex::Collect(std::string_view name,
                         std::vector<const Entry*>* out) const {
  if (parent_ != nullptr) parent_->Collect(name, out);
  auto it = entries_.find(std::string(name));
  if (it == entries_.end()) return;
  for (const Entry& e : it->second) out->push_back(&e);
}

const JavaMethod* FocalIndex::Lookup(std::string_view name,
                                     std::string_view test_class) const {
  std::vector<const Entry*> found;
  Collect(name, &found);
  if (found.empty()) return nullptr;
  const std::string preferred = FocalClassFor(test_class);
  const Entry* best = nullptr;
  auto earlier = [](const Entry* a, const Entry* b) {
    if (a->path != b->path) return a->path < b->path;
    return a->method->span.begin < b->method->span.begin;
  };
  for (const Entry* e : found) {
    if (e->method->class_name != preferred) continue;
    if (best == nullptr || earlier(e, best)) best = e;
  }
  if (best == nullptr) {
    for (const Entry* e : found) {
      if (best == nullptr || earlier(e, best)) best = e;
    }
  }
  return best->method.get();
}

std::size_t FocalIndex::size() const {
  std::size_t n = parent_ != nullptr ? parent_->size() : 0;
  for (const auto& [name, list] : entries_) n += list.size();
  return n;
}

std::optional<JavaMethod> ResolveFocal(const JavaMethod& test,
                                       const FocalIndex& index) {
  if (test.asserts.empty()) return std::nullopt;
  const std::size_t limit = test.asserts.front().statement.end;
  for (auto it = test.invocations.rbegin(); it != test.invocations.rend();
       ++it) {
    if (it->position >= limit) continue;
    if (IsAssertCallName(it->name)) continue;
    if (const JavaMethod* m = index.Lookup(it->name, test.class_name)) {
      return *m;
    }
  }
  return std::nullopt;
}

TestAssertPair MakeTap(const JavaMethod& test, const JavaMethod& focal,
                       std::string file) {
  if (test.asserts.size() != 1) {
    throw ReplacementError("test method " + test.name + " has " +
                           std::to_string(test.asserts.size()) +
                           " assert statements");
  }
  const AssertSite& site = test.asserts.front();
  if (site.statement.begin < test.text_span.begin ||
      site.statement.end > test.text_span.end ||
      site.statement.begin >= site.statement.end) {
    throw ReplacementError("assert span of " + test.name +
                           " lies outside the method text");
  }
  const std::size_t rel_begin = site.statement.begin - test.text_span.begin;
  const std::size_t rel_end = site.statement.end - test.text_span.begin;
  const std::string_view text(test.text);
  if (text[rel_end - 1] != ';') {
    throw ReplacementError("assert statement of " + test.name +
                           " is not terminated by ';'");
  }
  std::string replaced;
  replaced.reserve(text.size());
  replaced.append(text.substr(0, rel_begin));
  replaced.append(kPlaceholder);
  replaced.push_back(';');
  replaced.append(text.substr(rel_end));

  TestAssertPair tap;
  tap.test_with_placeholder = NormalizeWhitespace(replaced);
  tap.focal_method = NormalizeWhitespace(focal.text);
  tap.assert_stmt = NormalizeWhitespace(
      text.substr(site.expression.begin - test.text_span.begin,
                  site.expression.end - site.expression.begin));
  tap.source_text = tap.test_with_placeholder + " " + tap.focal_method;
  tap.target_text = tap.assert_stmt;
  tap.file = std::move(file);
  tap.method = test.name;
  return tap;
}

SplitCounts ComputeSplitCounts(std::size_t n, const SplitRatios& ratios) {
  SplitCounts c;
  // A tiny epsilon keeps exact products such as 10 * 0.8 from flooring down.
  c.train = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * ratios.train + 1e-9));
  c.test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * ratios.test + 1e-9));
  c.train = std::min(c.train, n);
  c.test = std::min(c.test, n - c.train);
  c.valid = n - c.train - c.test;
  return c;
}

CorpusSplit SplitCorpus(std::vector<TestAssertPair> taps,
                        const SplitRatios& ratios, std::uint64_t seed) {
  if (taps.empty()) throw EmptyCorpusError("cannot split an empty corpus");
  Rng rng(seed);
  ShuffleInPlace(taps, rng);
  const SplitCounts counts = ComputeSplitCounts(taps.size(), ratios);
  CorpusSplit split;
  split.ratios = ratios;
  split.seed = seed;
  auto it = std::make_move_iterator(taps.begin());
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(counts.train));
  it += static_cast<std::ptrdiff_t>(counts.train);
  split.valid.assign(it, it + static_cast<std::ptrdiff_t>(counts.valid));
  it += static_cast<std::ptrdiff_t>(counts.valid);
  split.test.assign(it, std::make_move_iterator(taps.end()));
  return split;
}

namespace {

std::vector<std::filesystem::path> JavaFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".java") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct ParsedFile {
  std::string rel_path;
  std::vector<JavaClass> classes;
  bool ok = false;
};

std::vector<ParsedFile> ParseAll(const std::vector<std::filesystem::path>& files,
                                 const std::filesystem::path& root, int jobs) {
  std::vector<ParsedFile> parsed(files.size());
  ParallelFor(files.size(), jobs, [&](std::size_t i) {
    parsed[i].rel_path =
        std::filesystem::relative(files[i], root).generic_string();
    try {
      parsed[i].classes = ParseJava(ReadFile(files[i]));
      parsed[i].ok = true;
    } catch (const Error&) {
      parsed[i].ok = false;
    }
  });
  return parsed;
}

}  // namespace

MiningResult MineDirectory(const MiningOptions& options) {
  const std::filesystem::path focal_dir =
      options.focal_dir.empty() ? options.src_dir : options.focal_dir;
  MiningResult result;

  const std::vector<ParsedFile> tests =
      ParseAll(JavaFiles(options.src_dir), options.src_dir, options.jobs);
  std::vector<ParsedFile> production;
  const bool same_dir = std::filesystem::equivalent(focal_dir, options.src_dir);
  if (!same_dir) {
    production = ParseAll(JavaFiles(focal_dir), focal_dir, options.jobs);
  }

  FocalIndex global;
  for (const ParsedFile& f : same_dir ? tests : production) {
    if (f.ok) global.AddClasses(f.classes, f.rel_path, /*skip_tests=*/true);
  }

  result.stats.files = tests.size();
  for (const ParsedFile& f : tests) {
    if (!f.ok) {
      ++result.stats.parse_errors;
      result.stats.failed_files.push_back(f.rel_path);
      continue;
    }
    // Same compilation unit; already present in `global` when the focal
    // directory is the source directory.
    FocalIndex unit(&global);
    if (!same_dir) unit.AddClasses(f.classes, f.rel_path, true);
    for (const JavaClass& cls : f.classes) {
      for (const JavaMethod& m : cls.methods) {
        if (m.HasAnnotation("Test")) ++result.stats.test_methods;
      }
      for (const JavaMethod& test : ExtractCandidates(cls.methods)) {
        ++result.stats.candidates;
        std::optional<JavaMethod> focal = ResolveFocal(test, unit);
        if (!focal) {
          ++result.stats.unresolved_focal;
          continue;
        }
        try {
          TestAssertPair tap = MakeTap(test, *focal, f.rel_path);
          if (options.without_focal) tap.source_text = tap.test_with_placeholder;
          result.taps.push_back(std::move(tap));
        } catch (const ReplacementError&) {
          ++result.stats.replacement_errors;
        }
      }
    }
  }
  return result;
}

std::string ToJsonl(const std::vector<TestAssertPair>& taps) {
  std::string out;
  for (const TestAssertPair& t : taps) {
    nlohmann::ordered_json j;
    j["source"] = t.source_text;
    j["target"] = t.target_text;
    j["file"] = t.file;
    j["method"] = t.method;
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

std::vector<TestAssertPair> ReadTapJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TestAssertPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (NormalizeWhitespace(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " +
                    e.what());
    }
    TestAssertPair t;
    t.source_text = j.value("source", "");
    t.target_text = j.value("target", "");
    t.assert_stmt = t.target_text;
    t.file = j.value("file", "");
    t.method = j.value("method", "");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace assertforge::mining
