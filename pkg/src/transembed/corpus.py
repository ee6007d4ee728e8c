"""Text ingestion: tokenization, vocabularies, monolingual and parallel corpora.

Tokenization rule (applied to every corpus and every gold dataset):

1. lowercase the text;
2. split on any run of whitespace;
3. a run of punctuation characters at the start or end of a whitespace token
   is split off as its own token (``"sat."`` -> ``"sat" "."``,
   ``'"hello'`` -> ``'"' "hello"``). Punctuation inside a token
   (``don't``, ``e-mail``) is kept. A token made only of punctuation stays whole.

"Punctuation" means any character whose Unicode category starts with ``P``.
"""
from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNK = "<unk>"


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_token(tok: str) -> list[str]:
    i = 0
    while i < len(tok) and _is_punct(tok[i]):
        i += 1
    if i == len(tok):
        return [tok]
    j = len(tok)
    while j > i and _is_punct(tok[j - 1]):
        j -= 1
    out = []
    if i:
        out.append(tok[:i])
    out.append(tok[i:j])
    if j < len(tok):
        out.append(tok[j:])
    return out


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, split edge punctuation (see module doc)."""
    tokens: list[str] = []
    for raw in text.lower().split():
        tokens.extend(_split_token(raw))
    return tokens


class Vocabulary:
    """Dense word <-> id map with occurrence counts.

    ``unk_id`` is ``None`` only for vocabularies read back from external
    embedding files that carry no unknown-word row.
    """

    def __init__(self, words: Sequence[str], counts: Sequence[int] | None = None,
                 unk_id: int | None = 0):
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        if counts is None:
            counts = [0] * len(self.words)
        if len(counts) != len(self.words):
            raise ValueError("counts length does not match words")
        if any(c < 0 for c in counts):
            raise ValueError("negative count")
        self.counts = [int(c) for c in counts]
        if unk_id is not None and not 0 <= unk_id < len(self.words):
            raise ValueError(f"unk_id {unk_id} out of range")
        self.unk_id = unk_id

    @classmethod
    def from_words(cls, words: Iterable[str], counts=None) -> "Vocabulary":
        """Vocabulary with ``<unk>`` at id 0 followed by ``words``."""
        words = [w for w in words if w != UNK]
        c = [0] + list(counts) if counts is not None else None
        return cls([UNK] + words, c, unk_id=0)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.words == other.words and self.counts == other.counts
                and self.unk_id == other.unk_id)

    def __repr__(self) -> str:
        return f"Vocabulary(size={self.size}, unk_id={self.unk_id})"

    def id(self, word: str) -> int:
        """Id of ``word``, falling back to ``unk_id``; KeyError without one."""
        i = self.index.get(word)
        if i is None:
            if self.unk_id is None:
                raise KeyError(word)
            return self.unk_id
        return i

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        return np.array([self.id(t) for t in tokens], dtype=np.int64)

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.words[int(i)] for i in ids]

    def with_tokens(self, extra: Sequence[str]) -> "Vocabulary":
        """Copy with ``extra`` tokens appended (already-present tokens skipped)."""
        new = [t for t in extra if t not in self.index]
        return Vocabulary(self.words + new, self.counts + [0] * len(new), self.unk_id)

    def content_ids(self) -> list[int]:
        return [i for i in range(self.size) if i != self.unk_id]

    def to_dict(self) -> dict:
        return {"words": self.words, "counts": self.counts, "unk_id": self.unk_id}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(d["words"], d["counts"], d["unk_id"])


def build_vocab(corpus: Iterable[str], max_size: int, min_count: int = 1) -> Vocabulary:
    """Keep the ``max_size - 1`` most frequent tokens seen at least ``min_count``
    times, plus ``<unk>`` (id 0). Equal counts rank by first occurrence.

    The ``<unk>`` count is the number of corpus tokens that did not make it in.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    counter: Counter = Counter()
    total = 0
    for tok in corpus:
        counter[tok] += 1
        total += 1
    if total == 0:
        raise ValueError("empty corpus")
    # Counter preserves insertion order, so enumerate() gives first occurrence
    order = {w: i for i, w in enumerate(counter)}
    ranked = sorted((w for w, c in counter.items() if c >= min_count and w != UNK),
                    key=lambda w: (-counter[w], order[w]))
    kept = ranked[:max_size - 1]
    kept_counts = [counter[w] for w in kept]
    return Vocabulary([UNK] + kept, [total - sum(kept_counts)] + kept_counts, unk_id=0)


@dataclass
class MonoCorpus:
    sentences: list[np.ndarray]
    vocab: Vocabulary

    @property
    def token_count(self) -> int:
        return int(sum(len(s) for s in self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass
class ParallelCorpus:
    pairs: list[tuple[np.ndarray, np.ndarray]]
    source_vocab: Vocabulary
    target_vocab: Vocabulary

    def __post_init__(self):
        for s, t in self.pairs:
            if len(s) and s.max() >= self.source_vocab.size:
                raise ValueError("source id outside source vocabulary")
            if len(t) and t.max() >= self.target_vocab.size:
                raise ValueError("target id outside target vocabulary")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def sources(self) -> list[np.ndarray]:
        return [s for s, _ in self.pairs]

    @property
    def targets(self) -> list[np.ndarray]:
        return [t for _, t in self.pairs]


def read_lines(path) -> list[str]:
    """LF-delimited lines; a final newline does not add an empty line."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def tokenized_lines(path) -> list[list[str]]:
    return [tokenize(line) for line in read_lines(path)]


def load_mono(path, vocab: Vocabulary | None = None, max_size: int = 50_000,
              min_count: int = 1) -> MonoCorpus:
    """One sentence per line. Builds the vocabulary from the file when not given."""
    lines = tokenized_lines(path)
    if vocab is None:
        vocab = build_vocab((t for line in lines for t in line), max_size, min_count)
    return MonoCorpus([vocab.encode(line) for line in lines], vocab)


def mono_from_sentences(sentences: Iterable[Sequence[str]], max_size: int = 50_000,
                        min_count: int = 1) -> MonoCorpus:
    sentences = [list(s) for s in sentences]
    vocab = build_vocab((t for s in sentences for t in s), max_size, min_count)
    return MonoCorpus([vocab.encode(s) for s in sentences], vocab)


def _check_line_counts(n_src: int, n_tgt: int):
    if n_src != n_tgt:
        raise ValueError(f"line count mismatch {n_src} vs {n_tgt}")


def load_parallel(source_path, target_path, source_vocab: Vocabulary,
                  target_vocab: Vocabulary) -> ParallelCorpus:
    """Line i of each file becomes pair i; unknown tokens map to ``unk_id``."""
    src = read_lines(source_path)
    tgt = read_lines(target_path)
    _check_line_counts(len(src), len(tgt))
    pairs = [(source_vocab.encode(tokenize(s)), target_vocab.encode(tokenize(t)))
             for s, t in zip(src, tgt)]
    return ParallelCorpus(pairs, source_vocab, target_vocab)


def parallel_from_files(source_path, target_path, source_max_size: int = 30_000,
                        target_max_size: int = 30_000, min_count: int = 1) -> ParallelCorpus:
    """Build both vocabularies from the bitext itself, then load it."""
    src = tokenized_lines(source_path)
    tgt = tokenized_lines(target_path)
    _check_line_counts(len(src), len(tgt))
    return parallel_from_sentences(zip(src, tgt), source_max_size, target_max_size, min_count)


def parallel_from_sentences(pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
                            source_max_size: int = 30_000, target_max_size: int = 30_000,
                            min_count: int = 1) -> ParallelCorpus:
    pairs = [(list(s), list(t)) for s, t in pairs]
    sv = build_vocab((w for s, _ in pairs for w in s), source_max_size, min_count)
    tv = build_vocab((w for _, t in pairs for w in t), target_max_size, min_count)
    return ParallelCorpus([(sv.encode(s), tv.encode(t)) for s, t in pairs], sv, tv)


def subsample(corpus: MonoCorpus, fraction: float, seed: int) -> MonoCorpus:
    """Uniform sample of ceil(fraction * N) sentences without replacement.

    Selected sentences keep their original relative order.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = len(corpus.sentences)
    # rounding guards against 0.3 * 10 == 3.0000000000000004
    m = math.ceil(round(fraction * n, 9))
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=m, replace=False))
    return MonoCorpus([corpus.sentences[i] for i in idx], corpus.vocab)
