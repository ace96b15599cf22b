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

// Python bindings for the library's main operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "assertforge/augmentation.h"
#include "assertforge/cli.h"
#include "assertforge/common.h"
#include "assertforge/evaluation.h"
#include "assertforge/mining.h"
#include "assertforge/noising.h"
#include "assertforge/textprep.h"

namespace py = pybind11;

namespace assertforge {
namespace {

py::dict TapDict(const mining::TestAssertPair& t) {
  py::dict d;
  d["source"] = t.source_text;
  d["target"] = t.target_text;
  d["test"] = t.test_with_placeholder;
  d["focal"] = t.focal_method;
  d["file"] = t.file;
  d["method"] = t.method;
  return d;
}

py::list Rejections(const std::vector<augmentation::Rejection>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(py::make_tuple(r.candidate, r.reason));
  return out;
}

}  // namespace
}  // namespace assertforge

PYBIND11_MODULE(_core, m) {
  using namespace assertforge;
  m.doc() = "Assert statement mining, generation and evaluation.";

  py::register_exception<Error>(m, "Error");

  // ---- mining ----
  m.def(
      "mine_directory",
      [](const std::filesystem::path& src_dir, std::optional<std::filesystem::path> focal_dir,
         bool without_focal, int jobs) {
        mining::MiningOptions opts;
        opts.src_dir = src_dir;
        if (focal_dir) opts.focal_dir = *focal_dir;
        opts.without_focal = without_focal;
        opts.jobs = jobs;
        const auto result = mining::MineDirectory(opts);
        py::list taps;
        for (const auto& t : result.taps) taps.append(TapDict(t));
        return taps;
      },
      py::arg("src_dir"), py::arg("focal_dir") = py::none(), py::arg("without_focal") = false,
      py::arg("jobs") = 1, "Test-assert pairs mined from a source tree.");
  m.def(
      "split_counts",
      [](std::size_t n) {
        const auto c = mining::ComputeSplitCounts(n, {});
        return py::make_tuple(c.train, c.valid, c.test);
      },
      py::arg("n"), "(train, valid, test) sizes for an n-pair corpus.");

  // ---- textprep ----
  py::class_<Vocabulary>(m, "Vocabulary")
      .def(py::init<>())
      .def_static("train", &Vocabulary::Train, py::arg("corpus"), py::arg("vocab_size"),
                  py::arg("min_pair_count") = 2)
      .def_static("load", &Vocabulary::Load, py::arg("path"))
      .def("save", &Vocabulary::Save, py::arg("path"))
      .def(
          "encode",
          [](const Vocabulary& v, const std::string& text, int max_len) {
            return v.Encode(text, max_len).ids;
          },
          py::arg("text"), py::arg("max_len") = 0)
      .def("decode", &Vocabulary::Decode, py::arg("ids"))
      .def("digest", &Vocabulary::Digest)
      .def("token", &Vocabulary::token, py::arg("id"))
      .def("__len__", &Vocabulary::size);

  // ---- noising ----
  m.def(
      "denoising_pair",
      [](const std::vector<int>& ids, const Vocabulary& vocab, const std::string& mode,
         std::uint64_t seed, std::uint64_t index) {
        noising::CorruptionConfig cfg;
        cfg.mode = noising::ParseMode(mode);
        cfg.seed = seed;
        cfg.Validate();
        const auto pair = noising::MakeDenoisingPair(ids, cfg, index, vocab);
        return py::make_tuple(pair.source, pair.target);
      },
      py::arg("ids"), py::arg("vocab"), py::arg("mode") = "code", py::arg("seed") = 0,
      py::arg("index") = 0, "(corrupted source, clean target) for one document.");

  // ---- evaluation ----
  m.def("normalize_assert", &evaluation::NormalizeAssert, py::arg("text"));
  m.def("syntax_check", &evaluation::SyntaxCheck, py::arg("text"));
  m.def(
      "bleu4",
      [](const std::string& candidate, const std::string& reference, bool smooth) {
        return evaluation::Bleu4(evaluation::BleuTokens(candidate),
                                 evaluation::BleuTokens(reference), smooth);
      },
      py::arg("candidate"), py::arg("reference"), py::arg("smooth") = false);
  m.def(
      "corpus_bleu4",
      [](const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> toks;
        for (const auto& [c, r] : pairs) {
          toks.emplace_back(evaluation::BleuTokens(c), evaluation::BleuTokens(r));
        }
        return evaluation::CorpusBleu4(toks);
      },
      py::arg("pairs"), "Corpus BLEU4 over (candidate, reference) strings.");
  m.def(
      "top_k_accuracy",
      [](const std::vector<std::vector<std::string>>& candidates,
         const std::vector<std::string>& targets, int k) {
        const auto r = evaluation::TopKAccuracy(candidates, targets, k);
        return py::make_tuple(r.count, r.fraction);
      },
      py::arg("candidates"), py::arg("targets"), py::arg("k"));
  m.def(
      "evaluate_json",
      [](const std::vector<std::vector<std::string>>& candidates,
         const std::vector<std::string>& targets, std::optional<double> valid_loss) {
        return evaluation::Evaluate(candidates, targets, valid_loss).ToJson();
      },
      py::arg("candidates"), py::arg("targets"), py::arg("valid_loss") = py::none());

  // ---- augmentation ----
  m.def(
      "augment",
      [](const std::vector<std::string>& candidates, const std::string& test_source,
         const std::string& focal_source) {
        const auto r = augmentation::Augment(candidates, test_source, focal_source);
        py::dict d;
        d["chosen"] = r.chosen_assert ? py::cast(*r.chosen_assert) : py::none();
        d["test"] = r.augmented_test ? py::cast(*r.augmented_test) : py::none();
        d["rejected"] = Rejections(r.rejected);
        return d;
      },
      py::arg("candidates"), py::arg("test_source"), py::arg("focal_source"),
      "Inserts the first acceptable candidate as the test's last statement.");

  // ---- command line ----
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::Dispatch(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one assert-forge subcommand: (exit code, stdout, stderr).");
}
