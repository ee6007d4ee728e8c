"""TOEFL-style four-way synonym questions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..embstore import EmbeddingSpace


@dataclass(frozen=True)
class ToeflQuestion:
    cue: str
    choices: tuple[str, str, str, str]
    answer: int

    def __post_init__(self):
        if len(self.choices) != 4 or len(set(self.choices)) != 4:
            raise ValueError(f"{self.cue}: need four distinct choices")
        if not 0 <= self.answer < 4:
            raise ValueError(f"{self.cue}: answer index {self.answer} outside 0-3")


@dataclass
class ToeflResult:
    accuracy: float
    correct: int
    retained: int
    dropped: int
    ties: int


def eval_toefl(space: EmbeddingSpace, questions: Iterable[ToeflQuestion],
               restrict: Iterable[str] | None = None, full_vocab: bool = False) -> ToeflResult:
    """Fraction of retained questions whose gold choice is strictly closest to the cue.

    A question is dropped if the cue or any choice is unusable or outside
    ``restrict``. Ties for the top cosine count as wrong. ``full_vocab`` instead
    takes the cue's nearest neighbour over the whole (restricted) vocabulary
    and scores it against the gold choice.
    """
    questions = list(questions)
    allowed = set(restrict) if restrict is not None else None
    ok = (lambda w: space.usable(w)) if allowed is None else (lambda w: w in allowed and space.usable(w))
    u = space.unit
    index = space.vocab.index
    cand = space.candidate_ids(allowed) if full_vocab else None
    correct = retained = ties = 0
    for q in questions:
        if not (ok(q.cue) and all(ok(c) for c in q.choices)):
            continue
        retained += 1
        cue = u[index[q.cue]]
        if full_vocab:
            ids = cand[cand != index[q.cue]]
            scores = u[ids] @ cue
            top = scores.max()
            winners = ids[scores == top]
            gold = index[q.choices[q.answer]]
        else:
            ids = np.array([index[c] for c in q.choices])
            scores = u[ids] @ cue
            top = scores.max()
            winners = ids[scores == top]
            gold = ids[q.answer]
        if len(winners) > 1:
            ties += 1
        elif winners[0] == gold:
            correct += 1
    if retained == 0:
        raise ValueError(f"no TOEFL questions retained ({len(questions)} dropped)")
    return ToeflResult(correct / retained, correct, retained, len(questions) - retained, ties)
