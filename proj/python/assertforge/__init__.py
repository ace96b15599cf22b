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

"""Assert statement mining, generation, evaluation and test augmentation."""

import json

from assertforge._core import (
    Error,
    Vocabulary,
    augment,
    bleu4,
    corpus_bleu4,
    denoising_pair,
    mine_directory,
    normalize_assert,
    run_cli,
    split_counts,
    syntax_check,
    top_k_accuracy,
)


def evaluate(candidates, targets, valid_loss=None):
    """Evaluation report as a dict (top-k, BLEU4, syntax, loss)."""
    from assertforge._core import evaluate_json

    return json.loads(evaluate_json(candidates, targets, valid_loss))


__all__ = [
    "Error",
    "Vocabulary",
    "augment",
    "bleu4",
    "corpus_bleu4",
    "denoising_pair",
    "evaluate",
    "mine_directory",
    "normalize_assert",
    "run_cli",
    "split_counts",
    "syntax_check",
    "top_k_accuracy",
]
