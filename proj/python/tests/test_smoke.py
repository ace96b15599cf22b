# Copyright 2026 The AssertForge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the Python bindings."""

import os
import pathlib

import pytest

import assertforge as af

FIXTURES = pathlib.Path(
    os.environ.get(
        "ASSERTFORGE_FIXTURES",
        pathlib.Path(__file__).resolve().parents[2] / "fixtures",
    )
)


def test_mine_fixture_repo():
    taps = af.mine_directory(FIXTURES / "repo" / "src")
    by_method = {t["method"]: t for t in taps}
    assert (
        by_method["testLength"]["target"]
        == "Assert.assertEquals(bset.length(), ibset.length())"
    )
    assert "<AssertPlaceHolder>" in by_method["testLength"]["source"]


def test_split_counts():
    assert af.split_counts(188154) == (150523, 18816, 18815)


def test_vocabulary_roundtrip(tmp_path):
    vocab = af.Vocabulary.train(["assertEquals(a, b);"] * 4, 270)
    ids = vocab.encode("assertEquals(a, b);")
    assert vocab.decode(ids) == "assertEquals(a, b);"
    path = tmp_path / "vocab.txt"
    vocab.save(path)
    assert af.Vocabulary.load(path).digest() == vocab.digest()
    with pytest.raises(af.Error):
        af.Vocabulary.train(["abc"], 10)


def test_denoising_is_deterministic():
    vocab = af.Vocabulary()
    ids = list(range(10, 60))
    first = af.denoising_pair(ids, vocab, mode="code", seed=3, index=1)
    assert first == af.denoising_pair(ids, vocab, mode="code", seed=3, index=1)
    assert first[1] == ids


def test_metrics():
    assert af.bleu4("a b c d e", "a b c d f") == pytest.approx(66.874, abs=0.01)
    assert af.corpus_bleu4([("a b c d", "a b c d")]) == pytest.approx(100.0)
    assert af.syntax_check("assertSame(ps1, ps2)")
    assert not af.syntax_check("assertTrue(( status == 0")
    assert af.normalize_assert("assertTrue(  x );") == "assertTrue( x )"
    count, fraction = af.top_k_accuracy([["x", "y"], ["z"]], ["y", "q"], 2)
    assert (count, fraction) == (1, 0.5)
    report = af.evaluate([["assertTrue(a)"]], ["assertTrue(a);"])
    assert report["topk"]["1"]["fraction"] == 1.0
    assert report["syntax"]["1"] == 1.0


def test_augment_and_none_case():
    focal = (FIXTURES / "evosuite" / "focal" / "NumberUtils.java").read_text()
    test = (
        "@Test public void t() throws Throwable {\n"
        '  int int0 = NumberUtils.toInt("5");\n'
        "}"
    )
    r = af.augment(["assertEquals(5, foo0)", "assertEquals(5, int0);"], test, focal)
    assert r["chosen"] == "assertEquals(5, int0)"
    assert r["test"].rstrip().endswith("assertEquals(5, int0);\n}")
    assert r["rejected"] == [("assertEquals(5, foo0)", "scope: foo0")]
    none = af.augment(["assertEquals(x"], test, focal)
    assert none["chosen"] is None and none["test"] is None


def test_cli_passthrough():
    code, out, _ = af.run_cli(["--help"])
    assert code == 0 and "mine" in out
    code, _, _ = af.run_cli(["no-such-command"])
    assert code == 2
