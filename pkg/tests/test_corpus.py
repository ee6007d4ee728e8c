from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transembed.corpus import (UNK, MonoCorpus, ParallelCorpus, Vocabulary, build_vocab,
                               load_mono, load_parallel, mono_from_sentences, read_lines,
                               subsample, tokenize)


@pytest.mark.parametrize("text,expected", [
    ("The cat sat.", ["the", "cat", "sat", "."]),
    ("", []),
    ("A  b\tc", ["a", "b", "c"]),
    ('"Hello," she said', ['"', "hello", ',"', "she", "said"]),
    ("don't e-mail", ["don't", "e-mail"]),
    ("...", ["..."]),
])
def test_tokenize(text, expected):
    assert tokenize(text) == expected


def test_build_vocab_frequency_and_first_occurrence_ties():
    v = build_vocab(["a", "a", "b", "c"], max_size=3)
    assert v.words == [UNK, "a", "b"]
    assert v.counts == [1, 2, 1]  # unk absorbs the dropped "c"
    assert v.unk_id == 0


def test_build_vocab_min_count():
    assert build_vocab(["a", "b"], max_size=10, min_count=2).words == [UNK]


def test_build_vocab_counts_match_bruteforce():
    toks = ["x"] * 5 + ["y"] * 3
    v = build_vocab(toks, max_size=3)
    brute = Counter(toks)
    assert v.words == [UNK, "x", "y"]
    assert [v.counts[v.index[w]] for w in ("x", "y")] == [brute["x"], brute["y"]]


def test_build_vocab_errors():
    with pytest.raises(ValueError, match="empty corpus"):
        build_vocab([], max_size=5)
    with pytest.raises(ValueError):
        build_vocab(["a"], max_size=0)


@given(st.lists(st.sampled_from(list("abcdefg")), min_size=1, max_size=60), st.randoms())
@settings(max_examples=60, deadline=None)
def test_build_vocab_shuffle_changes_only_tie_membership(tokens, rnd):
    shuffled = tokens[:]
    rnd.shuffle(shuffled)
    v1 = build_vocab(tokens, max_size=4)
    v2 = build_vocab(shuffled, max_size=4)
    c = Counter(tokens)
    for v in (v1, v2):
        for w in v.words[1:]:
            assert v.counts[v.index[w]] == c[w]
    # the multiset of kept counts is order independent
    assert sorted(v1.counts[1:]) == sorted(v2.counts[1:])


def test_vocabulary_invariants():
    v = Vocabulary.from_words(["a", "b"], [3, 4])
    assert all(v.index[w] == i for i, w in enumerate(v.words))
    assert v.id("zzz") == v.unk_id
    with pytest.raises(ValueError):
        Vocabulary(["a", "a"])
    with pytest.raises(ValueError):
        Vocabulary(["a"], [-1])
    with pytest.raises(ValueError):
        Vocabulary(["a"], unk_id=3)
    assert Vocabulary.from_dict(v.to_dict()) == v


@given(st.lists(st.integers(1, 5), max_size=20))
def test_encode_decode_round_trip(ids):
    v = Vocabulary.from_words(["a", "b", "c", "d", "e"])
    assert v.encode(v.decode(ids)).tolist() == ids


def test_load_parallel(tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    src.write_text("a b\nzz\n")
    tgt.write_text("x\ny x\n")
    sv, tv = Vocabulary.from_words(["a", "b"]), Vocabulary.from_words(["x", "y"])
    corpus = load_parallel(src, tgt, sv, tv)
    assert len(corpus) == 2
    assert corpus.pairs[1][0].tolist() == [sv.unk_id]
    assert corpus.pairs[1][1].tolist() == [tv.index["y"], tv.index["x"]]


def test_load_parallel_line_mismatch(tmp_path):
    (tmp_path / "s").write_text("a\nb\nc\n")
    (tmp_path / "t").write_text("a\nb\n")
    v = Vocabulary.from_words(["a"])
    with pytest.raises(ValueError, match="line count mismatch 3 vs 2"):
        load_parallel(tmp_path / "s", tmp_path / "t", v, v)
    with pytest.raises(OSError):
        load_parallel(tmp_path / "missing", tmp_path / "t", v, v)


def test_parallel_corpus_rejects_out_of_range_ids():
    v = Vocabulary.from_words(["a"])
    with pytest.raises(ValueError):
        ParallelCorpus([(np.array([5]), np.array([1]))], v, v)


def test_read_lines_and_load_mono(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("The cat.\nthe dog\n")
    assert read_lines(p) == ["The cat.", "the dog"]
    mono = load_mono(p)
    assert mono.token_count == sum(len(s) for s in mono.sentences) == 5
    assert mono.vocab.words[1] == "the"


def _mono(n):
    return mono_from_sentences([[f"w{i}"] for i in range(n)])


def test_subsample_counts_and_identity():
    c = _mono(10)
    assert len(subsample(c, 0.5, 1).sentences) == 5
    assert len(subsample(c, 0.3, 1).sentences) == 3
    full = subsample(c, 1.0, 7)
    assert [s.tolist() for s in full.sentences] == [s.tolist() for s in c.sentences]
    assert full.vocab is c.vocab


def test_subsample_deterministic_and_validated():
    c = _mono(50)
    a = subsample(c, 0.2, 3)
    b = subsample(c, 0.2, 3)
    assert [s.tolist() for s in a.sentences] == [s.tolist() for s in b.sentences]
    for bad in (0.0, 1.5, -0.1):
        with pytest.raises(ValueError):
            subsample(c, bad, 0)


@given(st.integers(1, 40), st.floats(0.01, 1.0), st.integers(0, 2**31))
@settings(max_examples=50)
def test_subsample_size_is_ceiling(n, f, seed):
    import math
    c = MonoCorpus([np.array([i]) for i in range(n)], Vocabulary.from_words(["a"]))
    out = subsample(c, f, seed)
    assert len(out.sentences) == math.ceil(round(f * n, 9))
    ids = [int(s[0]) for s in out.sentences]
    assert ids == sorted(set(ids))
