"""Embedding spaces: text persistence, vocabulary intersection, cosine queries.

Text format (word2vec-compatible): a header line ``<count> <dim>``, then one
line per word holding the token and ``dim`` space-separated floats printed
with 17 significant digits. UTF-8, LF line endings.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .corpus import UNK, Vocabulary


class OutOfVocabulary(KeyError):
    """Word missing from a space, outside a restriction, or with a zero vector."""

    def __str__(self):
        return f"out of vocabulary: {self.args[0]}"


class EmbeddingSpace:
    def __init__(self, vocab: Vocabulary, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != vocab.size:
            raise ValueError(f"matrix shape {matrix.shape} does not match vocabulary size {vocab.size}")
        self.vocab = vocab
        self.matrix = matrix
        self._unit = None
        self._nonzero = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.vocab.size

    def __contains__(self, word) -> bool:
        return self.usable(word)

    @property
    def unit(self) -> np.ndarray:
        """Row-normalised copy; zero rows stay zero."""
        if self._unit is None:
            norms = np.linalg.norm(self.matrix, axis=1)
            self._nonzero = norms > 0
            unit = np.zeros_like(self.matrix)
            unit[self._nonzero] = self.matrix[self._nonzero] / norms[self._nonzero, None]
            self._unit = unit
        return self._unit

    @property
    def nonzero(self) -> np.ndarray:
        self.unit
        return self._nonzero

    def usable(self, word: str) -> bool:
        """In the vocabulary, not the unknown-word row, and not a zero vector."""
        i = self.vocab.index.get(word)
        return i is not None and i != self.vocab.unk_id and bool(self.nonzero[i])

    def row(self, word: str) -> int:
        if not self.usable(word):
            raise OutOfVocabulary(word)
        return self.vocab.index[word]

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.row(word)]

    def words(self) -> list[str]:
        """Non-unk words, in id order."""
        unk = self.vocab.unk_id
        return [w for i, w in enumerate(self.vocab.words) if i != unk]

    def candidate_ids(self, restrict: Iterable[str] | None = None) -> np.ndarray:
        """Sorted ids of usable rows, optionally limited to ``restrict``."""
        if restrict is None:
            ids = [i for i in range(self.vocab.size) if i != self.vocab.unk_id]
        else:
            ids = sorted({self.vocab.index[w] for w in restrict if w in self.vocab.index}
                         - {self.vocab.unk_id})
        ids = np.asarray(ids, dtype=np.int64)
        return ids[self.nonzero[ids]] if len(ids) else ids


def save_text(space: EmbeddingSpace, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{space.vocab.size} {space.dim}\n")
        for word, row in zip(space.vocab.words, space.matrix):
            f.write(word + " " + " ".join(f"{x:.17g}" for x in row) + "\n")


def load_text(path) -> EmbeddingSpace:
    """Parse the text format; a row named ``<unk>`` becomes the unknown-word id."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("line 1: empty file, expected '<count> <dim>' header")
    header = lines[0].split()
    try:
        count, dim = (int(x) for x in header)
    except ValueError:
        raise ValueError(f"line 1: malformed header {lines[0]!r}, expected '<count> <dim>'") from None
    if len(lines) - 1 != count:
        raise ValueError(f"line 1: header declares {count} rows, file has {len(lines) - 1}")
    words = []
    matrix = np.empty((count, dim))
    for n, line in enumerate(lines[1:], start=2):
        parts = line.rstrip(" ").split(" ")
        if len(parts) - 1 != dim:
            raise ValueError(f"line {n}: expected {dim} values, got {len(parts) - 1}")
        words.append(parts[0])
        try:
            matrix[n - 2] = [float(x) for x in parts[1:]]
        except ValueError:
            raise ValueError(f"line {n}: non-numeric value") from None
    if len(set(words)) != len(words):
        raise ValueError("duplicate words in embedding file")
    unk = words.index(UNK) if UNK in words else None
    return EmbeddingSpace(Vocabulary(words, None, unk), matrix)


def intersect_vocab(spaces: Sequence[EmbeddingSpace]) -> list[str]:
    """Sorted words usable in every space."""
    if not spaces:
        raise ValueError("need at least one space")
    shared = None
    for space in spaces:
        words = {w for w in space.words() if space.usable(w)}
        shared = words if shared is None else shared & words
    return sorted(shared)


def cosine(space: EmbeddingSpace, w1: str, w2: str) -> float:
    """Cosine of two words; raises OutOfVocabulary for unusable words."""
    u = space.unit
    return float(u[space.row(w1)] @ u[space.row(w2)])


def neighbors(space: EmbeddingSpace, word: str, k: int = 10,
              restrict: Iterable[str] | None = None, exclude: Iterable[str] | None = None,
              drop_plurals: bool = False) -> list[tuple[str, float]]:
    """Exhaustive top-k cosine neighbours, ties broken by vocabulary id.

    ``drop_plurals`` removes the candidates ``word + "s"`` and ``word + "es"``.
    """
    q = space.row(word)
    ids = space.candidate_ids(restrict)
    banned = {q}
    skip = set(exclude or ())
    if drop_plurals:
        skip |= {word + "s", word + "es"}
    banned |= {space.vocab.index[w] for w in skip if w in space.vocab.index}
    ids = ids[~np.isin(ids, list(banned))]
    scores = space.unit[ids] @ space.unit[q]
    order = np.lexsort((ids, -scores))[:k]
    return [(space.vocab.words[ids[i]], float(scores[i])) for i in order]
