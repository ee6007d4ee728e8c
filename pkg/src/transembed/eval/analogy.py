"""Vector-offset analogy resolution (a : b :: c : ?)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..embstore import EmbeddingSpace

CATEGORIES = ("syntactic", "semantic")


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str
    category: str
    section: str = ""

    def __post_init__(self):
        if len({self.a, self.b, self.c, self.d}) != 4:
            raise ValueError(f"analogy {self.a} {self.b} {self.c} {self.d}: words must be distinct")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown analogy category {self.category!r}")


@dataclass
class AnalogyResult:
    syntactic_accuracy: float | None
    semantic_accuracy: float | None
    retained_syntactic: int
    retained_semantic: int
    correct_syntactic: int
    correct_semantic: int
    dropped: int
    ties: int

    @property
    def retained(self) -> int:
        return self.retained_syntactic + self.retained_semantic

    def accuracy(self, category: str) -> float | None:
        return getattr(self, f"{category}_accuracy")


def format_retained(result: AnalogyResult) -> str:
    return (f"{result.retained:,} retained analogies "
            f"({result.retained_syntactic} syntactic, {result.retained_semantic} semantic)")


def answer_scores(space: EmbeddingSpace, a: str, b: str, c: str, candidates: np.ndarray) -> np.ndarray:
    """Cosine of each candidate row to unit(c) + unit(b) - unit(a)."""
    u = space.unit
    idx = space.vocab.index
    v = u[idx[c]] + u[idx[b]] - u[idx[a]]
    n = np.linalg.norm(v)
    scores = u[candidates] @ v
    return scores / n if n > 0 else scores


def eval_analogy(space: EmbeddingSpace, questions: Iterable[AnalogyQuestion],
                 restrict: Iterable[str] | None = None, chunk: int = 512) -> AnalogyResult:
    """Per-category accuracy of nearest-cosine answers, excluding the three cue words.

    Questions with any word unusable or outside ``restrict`` are dropped. The
    answer set is the restricted vocabulary (or every usable word). A question
    is correct only when d beats every other candidate strictly.
    """
    questions = list(questions)
    allowed = set(restrict) if restrict is not None else None
    cand = space.candidate_ids(allowed)
    idx = space.vocab.index

    def ok(w):
        return space.usable(w) and (allowed is None or w in allowed)

    kept = [q for q in questions if all(ok(w) for w in (q.a, q.b, q.c, q.d))]
    if not kept:
        raise ValueError(f"no analogy questions retained ({len(questions)} dropped)")

    # position of every vocabulary id inside the candidate list
    pos = np.full(space.vocab.size, -1, dtype=np.int64)
    pos[cand] = np.arange(len(cand))
    u = space.unit
    U = u[cand]
    correct = {c: 0 for c in CATEGORIES}
    retained = {c: 0 for c in CATEGORIES}
    ties = 0
    for start in range(0, len(kept), chunk):
        block = kept[start:start + chunk]
        ia = np.array([idx[q.a] for q in block])
        ib = np.array([idx[q.b] for q in block])
        ic = np.array([idx[q.c] for q in block])
        idd = np.array([idx[q.d] for q in block])
        # ranking by dot with the unnormalised offset equals ranking by cosine
        S = (u[ic] + u[ib] - u[ia]) @ U.T
        rows = np.arange(len(block))
        for ids in (ia, ib, ic):
            S[rows, pos[ids]] = -np.inf
        gold = S[rows, pos[idd]]
        S[rows, pos[idd]] = -np.inf
        rival = S.max(axis=1)
        for q, g, r in zip(block, gold, rival):
            retained[q.category] += 1
            if g > r:
                correct[q.category] += 1
            elif g == r:
                ties += 1

    def acc(c):
        return correct[c] / retained[c] if retained[c] else None

    return AnalogyResult(acc("syntactic"), acc("semantic"), retained["syntactic"],
                         retained["semantic"], correct["syntactic"], correct["semantic"],
                         len(questions) - len(kept), ties)


def solve_analogy(space: EmbeddingSpace, a: str, b: str, c: str, k: int = 1,
                  restrict: Iterable[str] | None = None) -> list[tuple[str, float]]:
    """Top-k answers to a : b :: c : ?, never returning a, b or c."""
    for w in (a, b, c):
        space.row(w)
    cand = space.candidate_ids(set(restrict) if restrict is not None else None)
    idx = space.vocab.index
    cand = cand[~np.isin(cand, [idx[a], idx[b], idx[c]])]
    scores = answer_scores(space, a, b, c, cand)
    order = np.lexsort((cand, -scores))[:k]
    return [(space.vocab.words[cand[i]], float(scores[i])) for i in order]
