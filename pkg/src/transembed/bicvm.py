"""Additive bilingual compositional model.

A sentence is represented by the sum of its word embeddings. Aligned pairs
(S_E, S_F) are pulled together against a noise target sentence S_N with the
hinge loss  max(0, m + ||R_E - R_F||^2 - ||R_E - R_N||^2).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .corpus import ParallelCorpus, Vocabulary
from .embstore import EmbeddingSpace
from .numerics import ParamSet, as_floats, make_rng, uniform

log = logging.getLogger(__name__)


@dataclass
class BicvmConfig:
    dim: int = 64
    margin: float = 1.0
    lr: float = 0.01
    epochs: int = 5
    seed: int = 0

    def validate(self):
        if self.dim < 1 or self.epochs < 0:
            raise ValueError("dim must be >= 1 and epochs >= 0")
        if self.margin <= 0 or self.lr <= 0:
            raise ValueError("margin and lr must be positive")


@dataclass
class BicvmModel:
    source_embeddings: np.ndarray
    target_embeddings: np.ndarray
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    margin: float = 1.0
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.source_embeddings.shape[1] != self.target_embeddings.shape[1]:
            raise ValueError("source and target embeddings must share a dimension")
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    @property
    def dim(self) -> int:
        return self.source_embeddings.shape[1]

    def to_space(self, side: str = "source") -> EmbeddingSpace:
        if side == "source":
            return EmbeddingSpace(self.source_vocab, self.source_embeddings.copy())
        if side == "target":
            return EmbeddingSpace(self.target_vocab, self.target_embeddings.copy())
        raise ValueError(f"side must be 'source' or 'target', got {side!r}")

    def params(self) -> ParamSet:
        """Copy of both tables as a ParamSet (names ``source``, ``target``)."""
        return ParamSet({"source": self.source_embeddings, "target": self.target_embeddings})


def compose(embeddings: np.ndarray, sentence) -> np.ndarray:
    ids = np.asarray(sentence, dtype=np.int64)
    if len(ids) and (ids.min() < 0 or ids.max() >= embeddings.shape[0]):
        raise IndexError("word id outside the embedding table")
    return embeddings[ids].sum(axis=0) if len(ids) else np.zeros(embeddings.shape[1])


def contrastive_loss(r_e, r_f, r_noise, margin: float) -> float:
    r_e, r_f, r_noise = (as_floats(x) for x in (r_e, r_f, r_noise))
    if not r_e.shape == r_f.shape == r_noise.shape:
        raise ValueError("representations differ in dimension")
    a = r_e - r_f
    b = r_e - r_noise
    return max(0.0, margin + a @ a - b @ b)


def triple_loss(params: ParamSet, source, target, noise, margin: float) -> float:
    """Hinge loss of one (source, target, noise) triple; accumulates gradients."""
    src, tgt = params["source"], params["target"]
    r_e, r_f, r_n = compose(src, source), compose(tgt, target), compose(tgt, noise)
    loss = contrastive_loss(r_e, r_f, r_n, margin)
    if loss > 0.0:
        np.add.at(params.grads["source"], np.asarray(source, dtype=np.int64), 2.0 * (r_n - r_f))
        np.add.at(params.grads["target"], np.asarray(target, dtype=np.int64), -2.0 * (r_e - r_f))
        np.add.at(params.grads["target"], np.asarray(noise, dtype=np.int64), 2.0 * (r_e - r_n))
    return loss


def _csr(sentences):
    lengths = np.array([len(s) for s in sentences], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(lengths))).astype(np.int64)
    ids = (np.concatenate([np.asarray(s, dtype=np.int64) for s in sentences])
           if lengths.sum() else np.zeros(0, dtype=np.int64))
    return offsets, ids


def init_model(source_vocab: Vocabulary, target_vocab: Vocabulary, dim: int, margin: float,
               rng) -> BicvmModel:
    return BicvmModel(uniform(rng, (source_vocab.size, dim), 0.5 / dim),
                      uniform(rng, (target_vocab.size, dim), 0.5 / dim),
                      source_vocab, target_vocab, margin)


def draw_noise(order: np.ndarray, n: int, rng) -> np.ndarray:
    """For each aligned index, a uniformly drawn different pair index."""
    noise = rng.integers(0, n - 1, size=len(order))
    return noise + (noise >= order)


def train(corpus: ParallelCorpus, config: BicvmConfig | None = None) -> BicvmModel:
    config = config or BicvmConfig()
    config.validate()
    n = len(corpus)
    if n == 0:
        raise ValueError("empty corpus")
    if n < 2:
        raise ValueError("need >=2 pairs for noise sampling")
    rng = make_rng(config.seed)
    model = init_model(corpus.source_vocab, corpus.target_vocab, config.dim, config.margin, rng)
    src_off, src_ids = _csr(corpus.sources)
    tgt_off, tgt_ids = _csr(corpus.targets)
    total_steps = max(1, config.epochs * n)
    for epoch in range(config.epochs):
        order = rng.permutation(n).astype(np.int64)
        noise = draw_noise(order, n, rng).astype(np.int64)
        progress = (epoch * n + np.arange(n)) / total_steps
        lrs = config.lr * (1.0 - (1.0 - 1e-4) * progress)
        total = kernels.bicvm_pass(model.source_embeddings, model.target_embeddings,
                                   src_off, src_ids, tgt_off, tgt_ids, order, noise,
                                   lrs, config.margin)
        model.epoch_losses.append(total / n)
        log.info("bicvm epoch %d: mean loss %.4f", epoch + 1, model.epoch_losses[-1])
    return model
