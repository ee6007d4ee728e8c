import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from builders import make_space
from transembed.corpus import ParallelCorpus, Vocabulary, parallel_from_sentences
from transembed.pivot import (AlignmentTable, estimate_translations, pivot_report, point_biserial,
                              report_csv, shares_pivot, summary_csv)

TOY = [(["the", "cat"], ["le", "chat"]),
       (["the", "dog"], ["le", "chien"]),
       (["a", "cat"], ["un", "chat"]),
       (["dog", "barks"], ["chien", "aboie", "le"])]


def _table_words(table):
    out = {}
    for s, entries in table.entries.items():
        for t, d in entries:
            out[(table.source_vocab.words[s], table.target_vocab.words[t])] = d
    return out


def test_dice_matches_counting_oracle():
    table = estimate_translations(parallel_from_sentences(TOY), threshold=0.0)
    got = _table_words(table)
    want = oracles.dice_oracle(TOY)
    assert got.keys() == want.keys()
    for k in want:
        assert got[k] == pytest.approx(want[k], abs=1e-15)
    assert got[("cat", "chat")] == 1.0
    assert ("cat", "chien") not in got and ("a", "aboie") not in got


def test_entries_sorted_and_bounded():
    table = estimate_translations(parallel_from_sentences(TOY), threshold=0.0)
    for entries in table.entries.values():
        scores = [d for _, d in entries]
        assert scores == sorted(scores, reverse=True)
        assert all(0 < d <= 1 for d in scores)
    assert table.words("dog")[0] == ("chien", 1.0)
    assert table.words("zebra") == []


def test_repeated_tokens_count_once_and_unk_excluded():
    pairs = [(["x", "x"], ["y"]), (["x"], ["y", "y"])]
    table = estimate_translations(parallel_from_sentences(pairs), threshold=0.0)
    assert _table_words(table) == {("x", "y"): 1.0}
    sv = Vocabulary.from_words(["a"])
    tv = Vocabulary.from_words(["b"])
    corpus = ParallelCorpus([(np.array([1, sv.unk_id]), np.array([tv.unk_id, 1]))], sv, tv)
    assert _table_words(estimate_translations(corpus, 0.0)) == {("a", "b"): 1.0}
    with pytest.raises(ValueError, match="empty"):
        estimate_translations(ParallelCorpus([], sv, tv))


sentence = st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=4)
bitext = st.lists(st.tuples(sentence, sentence), min_size=1, max_size=8)


@given(bitext)
@settings(max_examples=50, deadline=None)
def test_swap_sides_transposes_table(pairs):
    pairs = [(s, [w.upper() for w in t]) for s, t in pairs]
    fwd = _table_words(estimate_translations(parallel_from_sentences(pairs), 0.0))
    back = _table_words(estimate_translations(parallel_from_sentences([(t, s) for s, t in pairs]), 0.0))
    assert {(t, s): d for (s, t), d in fwd.items()} == pytest.approx(back, abs=1e-15)


def _table(spec):
    sv = Vocabulary(["s0", "s1", "s2", "s3"], None, None)
    tv = Vocabulary(["t0", "t1", "t2", "t3"], None, None)
    return AlignmentTable({s: sorted(v, key=lambda e: (-e[1], e[0])) for s, v in spec.items()}, sv, tv, 0.1)


def test_shares_pivot_examples():
    t = _table({0: [(1, 0.5)], 1: [(1, 0.7)], 2: [(2, 0.9)], 3: [(1, 0.2), (2, 0.8)]})
    assert shares_pivot(t, 0, 1) == shares_pivot(t, 1, 0)
    m = shares_pivot(t, 0, 1)
    assert m.shared and m.witness == 1 and m.score == 0.5
    assert not shares_pivot(t, 0, 2).shared and shares_pivot(t, 0, 2).witness is None
    t = _table({0: [(1, 0.6), (2, 0.4)], 1: [(2, 0.5), (3, 0.9)]})
    assert shares_pivot(t, 0, 1).witness == 2
    t = _table({0: [(1, 0.6), (2, 0.9)], 1: [(1, 0.9), (2, 0.6)]})
    assert shares_pivot(t, 0, 1).witness == 1  # tie on min score -> lower id
    assert not shares_pivot(t, 0, 3).shared


@given(bitext, st.floats(0.0, 0.5), st.floats(0.0, 0.5))
@settings(max_examples=50, deadline=None)
def test_pivot_symmetry_and_threshold_monotonicity(pairs, lo, extra):
    pairs = [(s, [w.upper() for w in t]) for s, t in pairs]
    corpus = parallel_from_sentences(pairs)
    low = estimate_translations(corpus, lo)
    high = estimate_translations(corpus, lo + extra)
    ids = range(1, corpus.source_vocab.size)
    for i in ids:
        for j in ids:
            a = shares_pivot(low, i, j)
            assert a.shared == shares_pivot(low, j, i).shared
            if shares_pivot(high, i, j).shared:
                assert a.shared


def test_pivot_report_examples():
    pairs = [(["a", "x"], ["p"]), (["b", "y"], ["p"]), (["c"], ["q"])]
    table = estimate_translations(parallel_from_sentences(pairs), 0.1)
    space = make_space({"a": [1.0, 0.0], "b": [1.0, 0.0], "c": [0.0, 1.0], "x": [1.0, 1.0], "y": [1.0, 1.0]})
    rows, summary = pivot_report(table, space, [("a", "b"), ("x", "y")])
    assert all(r.shared for r in rows) and summary.mean_cosine_shared == pytest.approx(1.0)
    assert summary.n_unshared == 0 and summary.point_biserial is None

    rows, summary = pivot_report(table, space, [("a", "c")])
    assert summary.pairs == 1 and not rows[0].shared and rows[0].witness == ""
    assert summary.mean_cosine_unshared == rows[0].cosine == 0.0
    assert summary.point_biserial is None
    assert "point_biserial,undefined" in summary_csv(summary)

    rows, summary = pivot_report(table, space, [("a", "b"), ("a", "c"), ("b", "c"), ("a", "zz")])
    assert summary.skipped == 1 and summary.n_shared == 1 and summary.n_unshared == 2
    assert summary.point_biserial == pytest.approx(1.0)
    csv = report_csv(rows).splitlines()
    assert csv[0] == "word1,word2,shared_pivot,witness,cosine"
    assert csv[1] == "a,b,1,p,1.000000"
    with pytest.raises(ValueError, match="no resolvable word pairs"):
        pivot_report(table, space, [("zz", "a")])


def test_point_biserial_matches_pearson():
    x = [1, 0, 1, 1, 0]
    y = [0.9, 0.1, 0.5, 0.7, 0.4]
    assert point_biserial(x, y) == pytest.approx(oracles.pearson(x, y), abs=1e-14)
    assert point_biserial([1, 1], [0.1, 0.2]) is None
