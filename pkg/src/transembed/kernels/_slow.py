"""Pure-Python versions of the compiled loops in ``_fast.pyx``.

Same signatures, same update order; used when the extension is not built or
when ``TRANSEMBED_PURE_PYTHON`` is set.
"""
import numpy as np

from ._checks import check_csr, check_ids


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sgns_pass(cue, ctx, words, contexts, negatives, lrs):
    n = len(words)
    if len(contexts) != n or len(negatives) != n or len(lrs) != n:
        raise ValueError("pair arrays disagree in length")
    if ctx.shape[1] != cue.shape[1]:
        raise ValueError("cue and context tables differ in dimension")
    check_ids(words, cue.shape[0], "word")
    check_ids(contexts, ctx.shape[0], "context")
    check_ids(negatives, ctx.shape[0], "negative")
    total = 0.0
    labels = None
    for p in range(n):
        w = words[p]
        lr = lrs[p]
        targets = np.concatenate(([contexts[p]], negatives[p]))
        if labels is None or len(labels) != len(targets):
            labels = np.zeros(len(targets))
            labels[0] = 1.0
        v = cue[w].copy()
        U = ctx[targets]
        f = U @ v
        total -= _log_sigmoid(f[0]) + _log_sigmoid(-f[1:]).sum()
        g = _sigmoid(f) - labels
        np.add.at(ctx, targets, -lr * np.outer(g, v))
        cue[w] -= lr * (g @ U)
    return float(total)


def bicvm_pass(src, tgt, src_offsets, src_ids, tgt_offsets, tgt_ids, order, noise, lrs, margin):
    n = len(order)
    if len(noise) != n or len(lrs) != n:
        raise ValueError("pair arrays disagree in length")
    if tgt.shape[1] != src.shape[1]:
        raise ValueError("source and target tables differ in dimension")
    check_csr(src_offsets, src_ids, src.shape[0], "source")
    check_csr(tgt_offsets, tgt_ids, tgt.shape[0], "target")
    check_ids(order, len(src_offsets) - 1, "pair")
    check_ids(noise, len(tgt_offsets) - 1, "noise pair")
    total = 0.0
    for p in range(n):
        i, m, lr = order[p], noise[p], lrs[p]
        se = src_ids[src_offsets[i]:src_offsets[i + 1]]
        sf = tgt_ids[tgt_offsets[i]:tgt_offsets[i + 1]]
        sn = tgt_ids[tgt_offsets[m]:tgt_offsets[m + 1]]
        re = src[se].sum(axis=0)
        rf = tgt[sf].sum(axis=0)
        rn = tgt[sn].sum(axis=0)
        a = re - rf
        b = re - rn
        hinge = margin + a @ a - b @ b
        if hinge <= 0.0:
            continue
        total += hinge
        np.add.at(src, se, -lr * 2.0 * (rn - rf))
        np.add.at(tgt, sf, lr * 2.0 * a)
        np.add.at(tgt, sn, -lr * 2.0 * b)
    return float(total)
