"""Similarity performance as a function of training-data size."""
from __future__ import annotations

import csv
import dataclasses
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .. import skipgram
from ..corpus import MonoCorpus, subsample
from .similarity import SimilarityDataset, eval_similarity

HEADER = ("fraction", "dataset", "rho", "pairs_used")


@dataclass(frozen=True)
class CurveRow:
    fraction: float
    dataset: str
    rho: float
    pairs_used: int


def _cell(corpus, fraction, datasets, config):
    # every cell subsamples and trains from config.seed alone, so the result
    # does not depend on which worker runs it or in what order
    part = subsample(corpus, fraction, config.seed)
    space = skipgram.train(part, config).to_space()
    out = []
    for ds in datasets:
        res = eval_similarity(space, ds)
        out.append(CurveRow(fraction, ds.name, res.rho, res.used))
    return out


def learning_curve(corpus: MonoCorpus, fractions, datasets: list[SimilarityDataset],
                   config: skipgram.SkipgramConfig | None = None, jobs: int = 1) -> list[CurveRow]:
    fractions = [float(f) for f in fractions]
    if not fractions:
        raise ValueError("need at least one fraction")
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("fractions must be strictly ascending")
    config = dataclasses.replace(config or skipgram.SkipgramConfig(), workers=1)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            cells = list(pool.map(_cell, [corpus] * len(fractions), fractions,
                                  [datasets] * len(fractions), [config] * len(fractions)))
    else:
        cells = [_cell(corpus, f, datasets, config) for f in fractions]
    return [row for cell in cells for row in cell]


def curve_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([f"{r.fraction:g}", r.dataset, f"{r.rho:.6f}", r.pairs_used])
    return buf.getvalue()
