"""Small constructors shared by the tests."""
import numpy as np

from transembed.corpus import Vocabulary
from transembed.embstore import EmbeddingSpace


def make_space(rows: dict) -> EmbeddingSpace:
    """Space with an unk row (zero) followed by ``rows`` in insertion order."""
    vocab = Vocabulary.from_words(list(rows))
    dim = len(next(iter(rows.values())))
    matrix = np.zeros((vocab.size, dim))
    for w, v in rows.items():
        matrix[vocab.index[w]] = v
    return EmbeddingSpace(vocab, matrix)
