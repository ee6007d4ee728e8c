"""Skipgram with negative sampling.

Each cue word keeps a cue vector ``v`` and a context vector ``u``. For a
training pair (w, c) and k noise words n_i the loss is

    -log sigmoid(u_c . v_w) - sum_i log sigmoid(-u_{n_i} . v_w)

Only the cue table is exported as the embedding space.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .corpus import MonoCorpus, Vocabulary
from .embstore import EmbeddingSpace
from .numerics import ParamSet, log_sigmoid, make_rng, sigmoid, uniform

log = logging.getLogger(__name__)


@dataclass
class SkipgramConfig:
    dim: int = 64
    window: int = 5
    negatives: int = 5
    alpha: float = 0.75
    lr: float = 0.025
    epochs: int = 5
    seed: int = 0
    # word2vec-style frequent-word downsampling threshold; 0 disables it
    sample: float = 0.0
    # >1 shards each epoch across threads with unsynchronised updates
    workers: int = 1

    def validate(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 0:
            raise ValueError("dim, window and negatives must be >= 1, epochs >= 0")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.sample < 0 or self.workers < 1:
            raise ValueError("sample must be >= 0 and workers >= 1")


class NoiseDistribution:
    """Unigram^alpha distribution over the vocabulary, zero mass on ``<unk>``.

    Zero counts are floored at 1 so every real word can be drawn.
    """

    def __init__(self, vocab: Vocabulary, alpha: float = 0.75):
        counts = np.maximum(np.asarray(vocab.counts, dtype=np.float64), 1.0)
        weights = counts ** alpha
        if vocab.unk_id is not None:
            weights[vocab.unk_id] = 0.0
        total = weights.sum()
        if total <= 0:
            raise ValueError("noise distribution needs at least one non-unk word")
        self.alpha = alpha
        self.probabilities = weights / total
        self.cumulative = np.cumsum(self.probabilities)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        u = rng.random(size) * self.cumulative[-1]
        idx = np.searchsorted(self.cumulative, u, side="right")
        return np.minimum(idx, len(self.cumulative) - 1).astype(np.int64)


@dataclass
class SkipgramModel:
    cue_embeddings: np.ndarray
    context_embeddings: np.ndarray
    vocab: Vocabulary
    epoch_losses: list[float] = field(default_factory=list)
    deterministic: bool = True

    @property
    def dim(self) -> int:
        return self.cue_embeddings.shape[1]

    def to_space(self) -> EmbeddingSpace:
        return EmbeddingSpace(self.vocab, self.cue_embeddings.copy())

    def params(self) -> ParamSet:
        """Copy of both tables as a ParamSet (names ``cue``, ``context``)."""
        return ParamSet({"cue": self.cue_embeddings, "context": self.context_embeddings})


def init_model(vocab: Vocabulary, dim: int, rng: np.random.Generator) -> SkipgramModel:
    cue = uniform(rng, (vocab.size, dim), 0.5 / dim)
    return SkipgramModel(cue, np.zeros((vocab.size, dim)), vocab)


def sample_window_pairs(sentence, max_window: int, rng: np.random.Generator) -> np.ndarray:
    """(cue, context) id pairs as an (m, 2) array, ordered by cue position.

    Each position t draws a radius b uniformly from [1, max_window] and emits
    every neighbour within distance b, so a neighbour at distance j is kept
    with probability (max_window - j + 1) / max_window.
    """
    if max_window < 1:
        raise ValueError("max_window must be >= 1")
    s = np.asarray(sentence, dtype=np.int64)
    n = len(s)
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    radius = rng.integers(1, max_window + 1, size=n)
    pos = np.arange(n)
    cues, ctxs, keys = [], [], []
    for j in range(1, min(max_window, n - 1) + 1):
        keep = radius >= j
        for sign in (-1, 1):
            t = pos[keep & (pos + sign * j >= 0) & (pos + sign * j < n)]
            cues.append(t)
            ctxs.append(t + sign * j)
            keys.append(np.full(len(t), 2 * j + (sign > 0)))
    t = np.concatenate(cues)
    c = np.concatenate(ctxs)
    order = np.lexsort((np.concatenate(keys), t))
    return np.stack([s[t[order]], s[c[order]]], axis=1)


def _downsample(sentence: np.ndarray, keep_prob: np.ndarray, rng) -> np.ndarray:
    return sentence[rng.random(len(sentence)) < keep_prob[sentence]]


def _keep_probabilities(vocab: Vocabulary, sample: float) -> np.ndarray:
    counts = np.asarray(vocab.counts, dtype=np.float64)
    threshold = sample * counts.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (np.sqrt(counts / threshold) + 1.0) * threshold / counts
    p[~np.isfinite(p)] = 1.0
    return np.minimum(p, 1.0)


def sgns_loss(params: ParamSet, pairs, negatives, backward: bool = True):
    """Summed loss over ``pairs`` with fixed ``negatives`` (m, k).

    Reads ``params['cue']`` and ``params['context']``; with ``backward``
    accumulates the gradient into ``params.grads``.
    """
    loss = 0.0
    cue, ctx = params["cue"], params["context"]
    for (w, c), negs in zip(pairs, negatives):
        v = cue[w]
        f_pos = ctx[c] @ v
        f_neg = ctx[negs] @ v
        loss = loss - log_sigmoid(f_pos) - log_sigmoid(-f_neg).sum()
        if backward:
            g_pos = sigmoid(f_pos) - 1.0
            g_neg = sigmoid(f_neg)
            params.grads["cue"][w] += g_pos * ctx[c] + g_neg @ ctx[negs]
            params.grads["context"][c] += g_pos * v
            np.add.at(params.grads["context"], negs, np.outer(g_neg, v))
    return loss


def sgns_step(model: SkipgramModel, pair, k: int, noise: NoiseDistribution,
              rng: np.random.Generator, lr: float) -> float:
    """One SGD step on a single pair with k fresh negatives; returns the pre-update loss."""
    if k < 1:
        raise ValueError("k must be >= 1")
    negatives = noise.sample(rng, (1, k))
    w, c = pair
    return kernels.sgns_pass(model.cue_embeddings, model.context_embeddings,
                             np.array([w], dtype=np.int64), np.array([c], dtype=np.int64),
                             negatives, np.array([lr], dtype=np.float64))


def epoch_pairs(corpus: MonoCorpus, config: SkipgramConfig, rng, epoch: int,
                keep_prob: np.ndarray | None = None):
    """All training pairs of one epoch plus their per-pair learning rates."""
    n = len(corpus.sentences)
    total = max(1, config.epochs * n)
    unk = corpus.vocab.unk_id
    chunks, rates = [], []
    for i, sentence in enumerate(corpus.sentences):
        if keep_prob is not None:
            sentence = _downsample(sentence, keep_prob, rng)
        pairs = sample_window_pairs(sentence, config.window, rng)
        if unk is not None and len(pairs):
            pairs = pairs[pairs[:, 0] != unk]
        if not len(pairs):
            continue
        progress = (epoch * n + i) / total
        chunks.append(pairs)
        rates.append(np.full(len(pairs), config.lr * (1.0 - (1.0 - 1e-4) * progress)))
    if not chunks:
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0)
    return np.concatenate(chunks), np.concatenate(rates)


def train(corpus: MonoCorpus, config: SkipgramConfig | None = None) -> SkipgramModel:
    config = config or SkipgramConfig()
    config.validate()
    if not corpus.sentences:
        raise ValueError("empty corpus")
    rng = make_rng(config.seed)
    model = init_model(corpus.vocab, config.dim, rng)
    model.deterministic = config.workers == 1
    noise = NoiseDistribution(corpus.vocab, config.alpha)
    keep_prob = _keep_probabilities(corpus.vocab, config.sample) if config.sample > 0 else None
    for epoch in range(config.epochs):
        pairs, lrs = epoch_pairs(corpus, config, rng, epoch, keep_prob)
        if not len(pairs):
            model.epoch_losses.append(0.0)
            continue
        negatives = noise.sample(rng, (len(pairs), config.negatives))
        words = np.ascontiguousarray(pairs[:, 0])
        contexts = np.ascontiguousarray(pairs[:, 1])
        if config.workers == 1:
            total = kernels.sgns_pass(model.cue_embeddings, model.context_embeddings,
                                      words, contexts, negatives, lrs)
        else:
            bounds = np.linspace(0, len(pairs), config.workers + 1).astype(int)
            with ThreadPoolExecutor(config.workers) as pool:
                parts = pool.map(
                    lambda ab: kernels.sgns_pass(model.cue_embeddings, model.context_embeddings,
                                                 words[ab[0]:ab[1]], contexts[ab[0]:ab[1]],
                                                 negatives[ab[0]:ab[1]], lrs[ab[0]:ab[1]]),
                    zip(bounds[:-1], bounds[1:]))
                total = sum(parts)
        model.epoch_losses.append(total / len(pairs))
        log.info("skipgram epoch %d: %d pairs, mean loss %.4f", epoch + 1, len(pairs),
                 model.epoch_losses[-1])
    return model
