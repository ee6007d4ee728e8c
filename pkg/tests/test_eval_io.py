import logging

import numpy as np
import pytest

from transembed import skipgram
from transembed.corpus import mono_from_sentences
from transembed.eval import SimilarityDataset, eval_similarity
from transembed.eval import curve, datasets, report
from transembed.eval.report import ReportRow


def _corpus(n=300, seed=0):
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(12)]
    return mono_from_sentences([[words[j] for j in rng.integers(0, 12, 6)] for _ in range(n)])


def _datasets():
    rng = np.random.default_rng(1)
    pairs = [(f"w{i}", f"w{j}", float(rng.random())) for i in range(6) for j in range(6, 12)]
    return [SimilarityDataset(pairs[:20], "first"), SimilarityDataset(pairs[15:], "second")]


CFG = skipgram.SkipgramConfig(dim=6, epochs=1, seed=4)


def test_curve_full_fraction_equals_direct_run():
    corpus = _corpus()
    rows = curve.learning_curve(corpus, [1.0], _datasets(), CFG)
    space = skipgram.train(corpus, CFG).to_space()
    assert [r.dataset for r in rows] == ["first", "second"]
    for r, ds in zip(rows, _datasets()):
        direct = eval_similarity(space, ds)
        assert (r.fraction, r.rho, r.pairs_used) == (1.0, direct.rho, direct.used)


def test_curve_cardinality_format_and_parallel_parity():
    rows = curve.learning_curve(_corpus(), [0.25, 0.5, 1.0], _datasets(), CFG)
    assert len(rows) == 6
    text = curve.curve_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "fraction,dataset,rho,pairs_used"
    assert lines[1].startswith("0.25,first,")
    assert rows == curve.learning_curve(_corpus(), [0.25, 0.5, 1.0], _datasets(), CFG, jobs=2)


@pytest.mark.parametrize("fractions", [[], [0.5, 0.25], [0.0], [1.5], [0.5, 0.5]])
def test_curve_rejects_bad_fractions(fractions):
    with pytest.raises(ValueError):
        curve.learning_curve(_corpus(), fractions, _datasets(), CFG)


ROWS = [ReportRow("skipgram", "wordsim353", "rho", 0.6512345678, 340, 13),
        ReportRow("skipgram", "toefl", "%", 0.75, 60, 20),
        ReportRow("rnnsearch", "wordsim353", "rho", 0.58, 330, 23)]


def test_report_csv_round_trip():
    text = report.to_csv(ROWS)
    lines = text.splitlines()
    assert lines[0] == "model,dataset,metric,value,used,skipped"
    assert lines[1] == "skipgram,wordsim353,rho,0.651235,340,13"
    back = report.read_csv(text)
    assert [(r.model, r.dataset, r.metric) for r in back] == [(r.model, r.dataset, r.metric) for r in ROWS]
    with pytest.raises(ValueError, match="header"):
        report.read_csv("a,b\n1,2\n")
    with pytest.raises(ValueError):
        ReportRow("m", "d", "accuracy", 0.1, 1, 0)


def test_report_pretty_layout():
    out = report.pretty(ROWS).splitlines()
    assert out[0].split() == ["skipgram", "rnnsearch"]
    assert set(out[1]) == {"-"}
    assert out[2].split() == ["wordsim353", "rho", "0.65", "0.58"]
    assert out[3].split() == ["toefl", "%", "0.75", "-"]


def test_manifest_counts():
    m = datasets.load_manifest()
    counts = {d["name"]: d["rows"] for d in m["datasets"]}
    assert counts == {"wordsim353": 353, "men": 3000, "simlex999": 999, "simlex-assoc333": 333,
                      "toefl": 80, "synant": 744, "google-analogies": 19544}
    assert datasets.expected_rows("toefl") == 80 and datasets.expected_rows("nope") is None
    assert datasets.section_category("capital-world") == "semantic"
    assert datasets.section_category("gram3-comparative") == "syntactic"
    assert datasets.section_category("gram-custom") == "syntactic"


def test_check_rows_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert not datasets.check_rows("toefl", 79)
    assert "expects 80" in caplog.text
    assert datasets.check_rows("toefl", 80)


def test_load_similarity_formats(tmp_path, caplog):
    p = tmp_path / "ws.csv"
    p.write_text("Word 1,Word 2,Human (mean)\nTiger,cat,7.35\n# comment\n\ncat,tiger,7.0\nbook,paper,7.46\n")
    with caplog.at_level(logging.WARNING):
        ds = datasets.load_similarity(p)
    assert ds.name == "ws" and ds.items == [("tiger", "cat", 7.35), ("book", "paper", 7.46)]
    assert "duplicate" in caplog.text
    t = tmp_path / "men.txt"
    t.write_text("sun\tsunlight\t50\nfoo bar 1.5\n")
    assert datasets.load_similarity(t, "men").items == [("sun", "sunlight", 50.0), ("foo", "bar", 1.5)]
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,1\nc,d,x\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        datasets.load_similarity(bad)


def test_load_toefl_and_synant(tmp_path):
    p = tmp_path / "toefl.txt"
    p.write_text("Enormously | appropriately uniquely tremendously decidedly | 2\n")
    (q,) = datasets.load_toefl(p)
    assert q.cue == "enormously" and q.choices[q.answer] == "tremendously"
    p.write_text("a | b c d | 0\n")
    with pytest.raises(ValueError, match="expected 4 choices"):
        datasets.load_toefl(p)
    s = tmp_path / "synant.csv"
    s.write_text("word1,word2,label\nhot,cold,ant\nbig,large,syn\n")
    ds = datasets.load_synant(s)
    assert ds.pairs == [("hot", "cold", "antonym"), ("big", "large", "synonym")]


def test_load_analogies(tmp_path, caplog):
    p = tmp_path / "q.txt"
    p.write_text(": capital-common-countries\nAthens Greece Baghdad Iraq\n"
                 ": gram1-adjective-to-adverb\namazing amazingly apparent apparently\n"
                 "a a b c\n")
    with caplog.at_level(logging.WARNING):
        qs = datasets.load_analogies(p)
    assert [(q.a, q.category, q.section) for q in qs] == [
        ("athens", "semantic", "capital-common-countries"),
        ("amazing", "syntactic", "gram1-adjective-to-adverb")]
    assert "repeated word" in caplog.text
    p.write_text("a b c d\n")
    with pytest.raises(ValueError, match="before any"):
        datasets.load_analogies(p)
