"""Rank correlation between embedding cosines and human similarity scores."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..embstore import EmbeddingSpace


class UndefinedCorrelation(ValueError):
    pass


@dataclass
class SimilarityDataset:
    items: list[tuple[str, str, float]]
    name: str = "similarity"

    def __len__(self):
        return len(self.items)


@dataclass
class SimilarityResult:
    rho: float
    used: int
    skipped: int


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    # start index of each run of equal values
    starts = np.flatnonzero(np.r_[True, sx[1:] != sx[:-1]])
    ends = np.r_[starts[1:], len(x)]
    ranks = np.empty(len(x))
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = (a + b + 1) / 2.0
    return ranks


def spearman(xs, ys) -> float:
    """Spearman's rho: Pearson correlation of average ranks."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("spearman needs two 1-d sequences of equal length")
    if len(xs) < 2:
        raise ValueError("spearman needs at least 2 observations")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx @ rx) * (ry @ ry))
    if denom == 0.0:
        raise UndefinedCorrelation("correlation undefined: constant input")
    return float(np.clip((rx @ ry) / denom, -1.0, 1.0))


def _allowed(space: EmbeddingSpace, restrict: set | None):
    if restrict is None:
        return space.usable
    return lambda w: w in restrict and space.usable(w)


def eval_similarity(space: EmbeddingSpace, dataset: SimilarityDataset,
                    restrict: Iterable[str] | None = None) -> SimilarityResult:
    """Spearman rho between cosines and gold scores over usable pairs.

    A pair is skipped when either word is missing from the space, has a zero
    vector, or (with ``restrict``) lies outside the shared vocabulary.
    """
    ok = _allowed(space, set(restrict) if restrict is not None else None)
    gold, model = [], []
    u = space.unit
    index = space.vocab.index
    for w1, w2, score in dataset.items:
        if ok(w1) and ok(w2):
            gold.append(score)
            model.append(float(u[index[w1]] @ u[index[w2]]))
    skipped = len(dataset.items) - len(gold)
    if len(gold) < 2:
        raise ValueError(f"{dataset.name}: fewer than 2 usable pairs ({skipped} skipped)")
    return SimilarityResult(spearman(model, gold), len(gold), skipped)
