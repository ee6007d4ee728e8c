import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from transembed import bicvm
from transembed.bicvm import BicvmConfig, BicvmModel, compose, contrastive_loss, draw_noise, triple_loss
from transembed.corpus import Vocabulary, parallel_from_sentences
from transembed.numerics import ParamSet, grad_check, make_rng


def test_compose():
    E = np.arange(12.0).reshape(4, 3)
    np.testing.assert_array_equal(compose(E, [2]), E[2])
    np.testing.assert_array_equal(compose(E, []), np.zeros(3))
    np.testing.assert_array_equal(compose(E, [1, 3, 1]), [E[1][i] * 2 + E[3][i] for i in range(3)])
    with pytest.raises(IndexError):
        compose(E, [4])
    with pytest.raises(IndexError):
        compose(E, [-1])


def test_contrastive_loss_examples():
    r = np.array([1.0, 0.0])
    noise = r + np.array([1.0, 1.0])  # squared distance 2
    assert contrastive_loss(r, r, noise, 1.0) == 0.0
    f = np.array([0.3, -0.2])
    assert contrastive_loss(r, f, f, 0.7) == pytest.approx(0.7, abs=1e-15)
    e, f, n = np.array([0.5, -1.0, 2.0]), np.array([1.5, 0.0, 1.0]), np.array([0.0, 0.0, 0.0])
    # 1 + (1 + 1 + 1) - (0.25 + 1 + 4) = -1.25 -> hinge at 0; shift the noise to make it active
    assert contrastive_loss(e, f, n, 1.0) == 0.0
    n = np.array([0.5, -0.5, 2.0])
    assert contrastive_loss(e, f, n, 1.0) == pytest.approx(1 + 3 - 0.25)
    with pytest.raises(ValueError):
        contrastive_loss(e, f, np.zeros(2), 1.0)


vec = arrays(np.float64, 4, elements=st.floats(-3, 3))


@given(vec, vec, vec, st.floats(0.01, 5))
def test_contrastive_loss_hinge_properties(e, f, n, m):
    loss = contrastive_loss(e, f, n, m)
    assert loss >= 0.0
    gap = m + ((e - f) ** 2).sum() - ((e - n) ** 2).sum()
    assert (loss == 0.0) == (gap <= 0.0)


def _problem(seed, vs=7, vt=6, dim=4):
    rng = make_rng(seed)
    P = ParamSet({"source": rng.normal(scale=0.4, size=(vs, dim)),
                  "target": rng.normal(scale=0.4, size=(vt, dim))})
    s = rng.integers(0, vs, rng.integers(1, 5))
    t = rng.integers(0, vt, rng.integers(1, 5))
    n = rng.integers(0, vt, rng.integers(1, 5))
    return P, s, t, n


def test_triple_loss_grad_check_active_region():
    checked = 0
    for seed in range(30):
        P, s, t, n = _problem(seed)
        margin = 3.0
        if triple_loss(P.copy(), s, t, n, margin) < 1e-3:
            continue
        assert grad_check(lambda Q: triple_loss(Q, s, t, n, margin), P) <= 1e-6
        checked += 1
    assert checked >= 10


def test_gradient_is_zero_in_hinge_region():
    P, s, t, n = _problem(0)
    P["target"][n] += 100.0  # push the noise far away
    assert triple_loss(P, s, t, n, 1.0) == 0.0
    assert not P.grads["source"].any() and not P.grads["target"].any()


def test_zero_embeddings_give_margin():
    P, s, t, n = _problem(4)
    P["source"][:] = 0.0
    P["target"][:] = 0.0
    assert triple_loss(P, s, t, n, 0.8) == pytest.approx(0.8)


def test_draw_noise_never_returns_the_aligned_pair():
    order = np.tile(np.arange(5), 200)
    noise = draw_noise(order, 5, make_rng(0))
    assert (noise != order).all()
    assert set(noise.tolist()) == set(range(5))


def test_model_invariants():
    v = Vocabulary.from_words(["a"])
    with pytest.raises(ValueError):
        BicvmModel(np.zeros((2, 3)), np.zeros((2, 4)), v, v)
    with pytest.raises(ValueError):
        BicvmModel(np.zeros((2, 3)), np.zeros((2, 3)), v, v, margin=0.0)
    m = BicvmModel(np.ones((2, 3)), np.zeros((2, 3)), v, v)
    assert m.to_space("source").matrix.sum() == 6
    with pytest.raises(ValueError):
        m.to_space("middle")


def _lexicon_corpus(n_words=8, n=300, seed=0):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        ids = rng.choice(n_words, size=rng.integers(1, 4), replace=False)
        pairs.append(([f"s{i}" for i in ids], [f"t{i}" for i in ids]))
    return parallel_from_sentences(pairs)


def test_train_zero_epochs_and_errors():
    corpus = _lexicon_corpus(n=2)
    m = bicvm.train(corpus, BicvmConfig(dim=4, epochs=0, seed=1))
    init = bicvm.init_model(corpus.source_vocab, corpus.target_vocab, 4, 1.0, make_rng(1))
    assert np.array_equal(m.source_embeddings, init.source_embeddings)
    assert np.array_equal(m.target_embeddings, init.target_embeddings)
    one = parallel_from_sentences([(["a"], ["b"])])
    with pytest.raises(ValueError, match="need >=2 pairs"):
        bicvm.train(one, BicvmConfig(epochs=1))


def test_train_deterministic_and_aligns_lexicon():
    corpus = _lexicon_corpus()
    cfg = BicvmConfig(dim=8, epochs=20, lr=0.02, seed=3)
    a = bicvm.train(corpus, cfg)
    b = bicvm.train(corpus, cfg)
    assert np.array_equal(a.source_embeddings, b.source_embeddings)
    assert a.epoch_losses[-1] < a.epoch_losses[0]
    S, T = a.to_space("source"), a.to_space("target")
    su = S.unit
    tu = T.unit
    sv, tv = corpus.source_vocab, corpus.target_vocab
    cos = np.array([[su[sv.index[f"s{i}"]] @ tu[tv.index[f"t{j}"]] for j in range(8)] for i in range(8)])
    # each source word is closest to its own translation
    assert (cos.argmax(axis=1) == np.arange(8)).all()
