"""F1-weighted combination of the five model outputs.

Each model's weight is its F1 share: w_i = F1_i / sum(F1).  For one
instance, a p x n binary membership matrix (model x class) is scored
against the weight vector; the argmax class wins if its score clears
the threshold.  A zero argmax (no model emitted anything) never
populates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .models import ModelOutput


@dataclass(frozen=True)
class EnsembleWeights:
    """Normalized per-model weights, fixed model order."""

    weights: np.ndarray
    model_tags: tuple[str, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) != len(self.model_tags):
            raise ValueError("one weight per model is required")
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        object.__setattr__(self, "weights", w)


def compute_weights(
    f1_scores: Sequence[float], model_tags: Sequence[str]
) -> EnsembleWeights:
    """w_i = F1_i / sum(F1).  All-zero F1 is a configuration error: there
    is no uniform fallback, the caller must supply weights explicitly."""
    f1 = np.asarray(f1_scores, dtype=np.float64)
    if np.any(f1 < 0.0) or np.any(f1 > 1.0):
        raise ValueError("F1 scores must lie in [0, 1]")
    total = float(f1.sum())
    if total <= 0.0:
        raise ConfigError(
            "every model scored F1 = 0; derived weights are undefined. "
            "Supply explicit weights or improve the validation data."
        )
    return EnsembleWeights(weights=f1 / total, model_tags=tuple(model_tags))


def membership_matrix(
    instance: str, outputs: Sequence[ModelOutput], classes: Sequence[str]
) -> np.ndarray:
    """p x n binary matrix: entry (i, j) is 1 iff model i emitted class j
    for the instance.  A model that skipped the instance contributes an
    all-zero row."""
    class_pos = {cid: j for j, cid in enumerate(classes)}
    matrix = np.zeros((len(outputs), len(classes)), dtype=np.float64)
    for i, output in enumerate(outputs):
        for cid in output.classes_for(instance):
            j = class_pos.get(cid)
            if j is None:
                raise ValueError(
                    f"model {output.model_tag} emitted unknown class {cid!r}"
                )
            matrix[i, j] = 1.0
    return matrix


def score(weights: EnsembleWeights, matrix: np.ndarray) -> np.ndarray:
    """Total score vector: weights · matrix (length n, entries in [0, 1])."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(weights.weights):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match {len(weights.weights)} weights"
        )
    return weights.weights @ matrix


def assign(
    scores: np.ndarray, classes: Sequence[str], threshold: float = 0.0
) -> tuple[str, float] | None:
    """Argmax class when its score clears the threshold, else None.
    Exact ties go to the lexicographically smaller class id (classes
    are scanned in the given order, which callers keep sorted).
    A zero best score never assigns."""
    scores = np.asarray(scores, dtype=np.float64)
    if len(scores) != len(classes):
        raise ValueError("one score per class is required")
    if len(classes) == 0:
        return None
    best = int(np.argmax(scores))
    best_score = float(scores[best])
    if best_score <= 0.0 or best_score < threshold:
        return None
    return classes[best], best_score
