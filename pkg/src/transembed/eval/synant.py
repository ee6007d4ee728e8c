"""Synonym/antonym classification with k-fold cross-validation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..embstore import EmbeddingSpace
from ..numerics import make_rng
from .svm import train_kernel_classifier

LABELS = ("synonym", "antonym")


@dataclass
class SynAntSet:
    pairs: list[tuple[str, str, str]]
    name: str = "synant"

    def __post_init__(self):
        seen = set()
        for w1, w2, label in self.pairs:
            if label not in LABELS:
                raise ValueError(f"label must be synonym or antonym, got {label!r}")
            if (w1, w2) in seen:
                raise ValueError(f"duplicate pair {w1},{w2}")
            seen.add((w1, w2))

    def __len__(self):
        return len(self.pairs)


@dataclass
class SynAntResult:
    accuracy: float
    fold_accuracies: list[float] = field(default_factory=list)
    used: int = 0
    skipped: int = 0


def pair_features(space: EmbeddingSpace, dataset: SynAntSet, restrict=None):
    allowed = set(restrict) if restrict is not None else None

    def ok(w):
        return space.usable(w) and (allowed is None or w in allowed)

    rows, labels = [], []
    for w1, w2, label in dataset.pairs:
        if ok(w1) and ok(w2):
            rows.append(np.concatenate([space.vector(w1), space.vector(w2)]))
            labels.append(label)
    X = np.array(rows) if rows else np.zeros((0, 2 * space.dim))
    return X, np.array(labels), len(dataset.pairs) - len(rows)


def eval_synant(space: EmbeddingSpace, dataset: SynAntSet, folds: int = 10, seed: int = 0,
                restrict=None, gamma: float | None = None, C: float = 1.0) -> SynAntResult:
    """Mean held-out accuracy of a Gaussian SVM on concatenated word vectors.

    Usable pairs are shuffled with ``seed`` and split into ``folds`` nearly
    equal folds; each fold is scored by a classifier trained on the rest.
    ``gamma=None`` picks 1 / (n_features * feature variance) per training fold.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    X, y, skipped = pair_features(space, dataset, restrict)
    if len(X) < folds:
        raise ValueError(f"{len(X)} usable pairs, need at least {folds} for {folds}-fold CV")
    perm = make_rng(seed).permutation(len(X))
    parts = np.array_split(perm, folds)
    scores = []
    for k, test in enumerate(parts):
        train = np.concatenate([p for i, p in enumerate(parts) if i != k])
        clf = train_kernel_classifier(X[train], y[train], gamma, C)
        scores.append(float(np.mean(clf.predict(X[test]) == y[test])))
    return SynAntResult(float(np.mean(scores)), scores, len(X), skipped)
