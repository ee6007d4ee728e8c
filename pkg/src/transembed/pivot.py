"""Shared-translation diagnostics.

Two source words share a pivot when some target word is a likely translation
of both. Translations are estimated from sentence-level co-occurrence in a
bitext with the Dice coefficient

    dice(s, t) = 2 C(s, t) / (C(s) + C(t))

where C counts sentence pairs (each word counted at most once per sentence).
The report relates the shared-pivot indicator to embedding cosine.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import ParallelCorpus, Vocabulary
from .embstore import EmbeddingSpace, cosine


@dataclass
class AlignmentTable:
    entries: dict[int, list[tuple[int, float]]]
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    threshold: float

    def translations(self, source_id: int) -> list[tuple[int, float]]:
        return self.entries.get(source_id, [])

    def words(self, source_word: str) -> list[tuple[str, float]]:
        i = self.source_vocab.index.get(source_word)
        return [(self.target_vocab.words[t], s) for t, s in self.translations(i)] if i is not None else []


def _incidence(sentences, size: int) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(len(sentences)), [len(s) for s in sentences])
    cols = np.concatenate([np.asarray(s, dtype=np.int64) for s in sentences]) if len(rows) else rows
    m = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(sentences), size))
    m.data[:] = 1.0  # duplicates were summed; presence only
    return m


def estimate_translations(corpus: ParallelCorpus, threshold: float = 0.1) -> AlignmentTable:
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    S = _incidence(corpus.sources, corpus.source_vocab.size)
    T = _incidence(corpus.targets, corpus.target_vocab.size)
    joint = (S.T @ T).tocoo()
    cs = np.asarray(S.sum(axis=0)).ravel()
    ct = np.asarray(T.sum(axis=0)).ravel()
    dice = 2.0 * joint.data / (cs[joint.row] + ct[joint.col])
    keep = dice >= threshold
    for unk, side in ((corpus.source_vocab.unk_id, joint.row), (corpus.target_vocab.unk_id, joint.col)):
        if unk is not None:
            keep &= side != unk
    entries: dict[int, list[tuple[int, float]]] = {}
    for s, t, d in zip(joint.row[keep], joint.col[keep], dice[keep]):
        entries.setdefault(int(s), []).append((int(t), float(d)))
    for s in entries:
        entries[s].sort(key=lambda e: (-e[1], e[0]))
    return AlignmentTable(entries, corpus.source_vocab, corpus.target_vocab, threshold)


@dataclass(frozen=True)
class PivotMatch:
    shared: bool
    witness: int | None
    score: float | None


def shares_pivot(table: AlignmentTable, s1: int, s2: int) -> PivotMatch:
    """Shared target with the largest min(score1, score2); ties go to the lower id."""
    a = dict(table.translations(s1))
    b = dict(table.translations(s2))
    common = sorted(a.keys() & b.keys())
    if not common:
        return PivotMatch(False, None, None)
    best = max(common, key=lambda t: (min(a[t], b[t]), -t))
    return PivotMatch(True, best, min(a[best], b[best]))


@dataclass(frozen=True)
class PivotRow:
    word1: str
    word2: str
    shared: bool
    witness: str
    cosine: float


@dataclass
class PivotSummary:
    pairs: int
    skipped: int
    n_shared: int
    n_unshared: int
    mean_cosine_shared: float | None
    mean_cosine_unshared: float | None
    point_biserial: float | None


def point_biserial(indicator, values) -> float | None:
    """Pearson correlation of a 0/1 indicator with values; None when undefined."""
    x = np.asarray(indicator, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if len(x) < 2:
        return None
    x = x - x.mean()
    y = y - y.mean()
    denom = np.sqrt((x @ x) * (y @ y))
    return float(x @ y / denom) if denom > 0 else None


def pivot_report(table: AlignmentTable, space: EmbeddingSpace, pairs) -> tuple[list[PivotRow], PivotSummary]:
    index = table.source_vocab.index
    unk = table.source_vocab.unk_id
    rows = []
    skipped = 0
    for w1, w2 in pairs:
        i, j = index.get(w1), index.get(w2)
        if i is None or j is None or unk in (i, j) or not (space.usable(w1) and space.usable(w2)):
            skipped += 1
            continue
        m = shares_pivot(table, i, j)
        witness = table.target_vocab.words[m.witness] if m.shared else ""
        rows.append(PivotRow(w1, w2, m.shared, witness, cosine(space, w1, w2)))
    if not rows:
        raise ValueError(f"no resolvable word pairs ({skipped} skipped)")
    shared = [r.cosine for r in rows if r.shared]
    unshared = [r.cosine for r in rows if not r.shared]
    summary = PivotSummary(
        len(rows), skipped, len(shared), len(unshared),
        float(np.mean(shared)) if shared else None,
        float(np.mean(unshared)) if unshared else None,
        point_biserial([r.shared for r in rows], [r.cosine for r in rows]))
    return rows, summary


def report_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word1", "word2", "shared_pivot", "witness", "cosine"])
    for r in rows:
        w.writerow([r.word1, r.word2, int(r.shared), r.witness, f"{r.cosine:.6f}"])
    return buf.getvalue()


def summary_csv(summary: PivotSummary) -> str:
    def fmt(v):
        return "undefined" if v is None else (f"{v:.6f}" if isinstance(v, float) else str(v))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["statistic", "value"])
    for name in ("pairs", "skipped", "n_shared", "n_unshared", "mean_cosine_shared",
                 "mean_cosine_unshared", "point_biserial"):
        w.writerow([name, fmt(getattr(summary, name))])
    return buf.getvalue()
