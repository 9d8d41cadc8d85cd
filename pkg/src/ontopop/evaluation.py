"""Scoring against gold standards and the split protocol.

Per class: P = |model ∩ gold| / |model|, R = |model ∩ gold| / |gold|
(0 for empty denominators).  Model-level P/R are unweighted (macro)
means over the evaluated classes; model F1 is the harmonic mean of
those averaged values.  Candidate pools are split 70/20/10 into
train/validation/test; weights come from validation F1 and are frozen
before the test split is touched.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .models import ENSEMBLE_TAG, ModelOutput
from .ontology import Ontology

log = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.7, 0.2, 0.1)


def class_precision_recall(
    model_words: set[str], gold_words: set[str]
) -> tuple[float, float]:
    hits = len(model_words & gold_words)
    precision = hits / len(model_words) if model_words else 0.0
    if not gold_words:
        log.warning("empty gold set: recall defined as 0")
        recall = 0.0
    else:
        recall = hits / len(gold_words)
    return precision, recall


def f1(precision: float, recall: float) -> float:
    if not 0.0 <= precision <= 1.0 or not 0.0 <= recall <= 1.0:
        raise ValueError("precision and recall must lie in [0, 1]")
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def split_corpus(
    candidates: Sequence[str],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    rng_seed: int = 0,
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic shuffled partition into train/validation/test.

    Sizes follow largest-remainder rounding (ties to the earlier split),
    so each is within +/-1 of the exact ratio share.
    """
    if not candidates:
        raise ValueError("cannot split an empty candidate set")
    if any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be non-negative and sum to 1, got {ratios}")
    n = len(candidates)
    order = np.random.default_rng(rng_seed).permutation(n)
    shuffled = [candidates[i] for i in order]
    exact = [n * r for r in ratios]
    sizes = [int(x) for x in exact]
    remainders = sorted(
        range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i)
    )
    for i in range(n - sum(sizes)):
        sizes[remainders[i]] += 1
    train = shuffled[: sizes[0]]
    validation = shuffled[sizes[0] : sizes[0] + sizes[1]]
    test = shuffled[sizes[0] + sizes[1] :]
    return train, validation, test


def restrict_gold(gold: dict[str, set[str]], pool: Iterable[str]) -> dict[str, set[str]]:
    """Gold sets intersected with the evaluated pool, so recall is measured
    against what the models could actually see."""
    pool_set = set(pool)
    return {cid: words & pool_set for cid, words in gold.items()}


@dataclass
class ModelScore:
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    per_class: dict[tuple[str, str], tuple[float, float]]
    per_model: dict[str, ModelScore]
    ensemble_row: ModelScore | None = None
    split_sizes: tuple[int, int, int] | None = None
    weights: list[float] | None = None
    weights_source: str | None = None

    def rows(self) -> list[tuple[str, ModelScore]]:
        out = [(tag, sc) for tag, sc in self.per_model.items() if tag != ENSEMBLE_TAG]
        if self.ensemble_row is not None:
            out.append((ENSEMBLE_TAG, self.ensemble_row))
        return out

    def to_dict(self) -> dict:
        doc: dict = {
            "per_class": {
                f"{tag}/{cid}": {"precision": p, "recall": r}
                for (tag, cid), (p, r) in sorted(self.per_class.items())
            },
            "per_model": {
                tag: {"precision": sc.precision, "recall": sc.recall, "f1": sc.f1}
                for tag, sc in self.per_model.items()
            },
        }
        if self.ensemble_row is not None:
            doc["ensemble"] = {
                "precision": self.ensemble_row.precision,
                "recall": self.ensemble_row.recall,
                "f1": self.ensemble_row.f1,
            }
        if self.split_sizes is not None:
            doc["split_sizes"] = {
                "train": self.split_sizes[0],
                "validation": self.split_sizes[1],
                "test": self.split_sizes[2],
            }
        if self.weights is not None:
            doc["weights"] = self.weights
            doc["weights_source"] = self.weights_source
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def evaluate_models(
    outputs: Sequence[ModelOutput],
    gold: dict[str, set[str]],
    onto: Ontology,
) -> EvalReport:
    """Per-class then macro-averaged P/R/F1 for each output.

    Ontology classes missing from the gold standard are warned about and
    excluded from the averages.  An output tagged 'ensemble' lands in
    the report's ensemble row.
    """
    class_ids = onto.class_ids()
    evaluated = [cid for cid in class_ids if cid in gold]
    for cid in class_ids:
        if cid not in gold:
            log.warning("class %r missing from the gold standard, excluded", cid)
    per_class: dict[tuple[str, str], tuple[float, float]] = {}
    per_model: dict[str, ModelScore] = {}
    ensemble_row = None
    for output in outputs:
        precisions = []
        recalls = []
        for cid in evaluated:
            p, r = class_precision_recall(output.words_for_class(cid), gold[cid])
            per_class[(output.model_tag, cid)] = (p, r)
            precisions.append(p)
            recalls.append(r)
        mp = float(np.mean(precisions)) if precisions else 0.0
        mr = float(np.mean(recalls)) if recalls else 0.0
        row = ModelScore(precision=mp, recall=mr, f1=f1(mp, mr))
        if output.model_tag == ENSEMBLE_TAG:
            ensemble_row = row
        else:
            per_model[output.model_tag] = row
    return EvalReport(per_class=per_class, per_model=per_model, ensemble_row=ensemble_row)


def format_table(report: EvalReport) -> str:
    """Plain-text score table: one row per model plus the ensemble."""
    lines = [f"{'model':<10} {'Precision':>9} {'Recall':>9} {'F1':>9}"]
    for tag, sc in report.rows():
        lines.append(f"{tag:<10} {sc.precision:>9.2f} {sc.recall:>9.2f} {sc.f1:>9.2f}")
    if report.weights is not None:
        formatted = ", ".join(f"{w:.4f}" for w in report.weights)
        lines.append(f"weights ({report.weights_source}): [{formatted}]")
    if report.split_sizes is not None:
        tr, va, te = report.split_sizes
        lines.append(f"splits: train={tr} validation={va} test={te}")
    return "\n".join(lines) + "\n"
