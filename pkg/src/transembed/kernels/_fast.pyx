# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SGD inner loops for skipgram and the additive bilingual model.

Both loops release the GIL, so several threads may run them on disjoint
shards of the same tables (unsynchronised, nondeterministic updates).
"""
from libc.math cimport exp, log1p, tanh
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

from ._checks import check_csr, check_ids


cdef inline double _log_sigmoid(double x) noexcept nogil:
    if x >= 0:
        return -log1p(exp(-x))
    return x - log1p(exp(x))


cdef inline double _sigmoid(double x) noexcept nogil:
    return 0.5 * (1.0 + tanh(0.5 * x))


def sgns_pass(double[:, ::1] cue, double[:, ::1] ctx, const int64_t[::1] words,
              const int64_t[::1] contexts, const int64_t[:, ::1] negatives,
              const double[::1] lrs):
    """Apply one negative-sampling SGD step per (word, context) row; return summed loss."""
    cdef Py_ssize_t n = words.shape[0]
    cdef Py_ssize_t d = cue.shape[1]
    cdef Py_ssize_t k = negatives.shape[1]
    cdef Py_ssize_t p, i, j
    cdef int64_t w, t
    cdef double f, g, lr, total = 0.0
    if contexts.shape[0] != n or negatives.shape[0] != n or lrs.shape[0] != n:
        raise ValueError("pair arrays disagree in length")
    if ctx.shape[1] != d:
        raise ValueError("cue and context tables differ in dimension")
    check_ids(words, cue.shape[0], "word")
    check_ids(contexts, ctx.shape[0], "context")
    check_ids(negatives, ctx.shape[0], "negative")
    cdef double* v = <double*> malloc(d * sizeof(double))
    cdef double* neu = <double*> malloc(d * sizeof(double))
    cdef double* gs = <double*> malloc((k + 1) * sizeof(double))
    if v == NULL or neu == NULL or gs == NULL:
        free(v); free(neu); free(gs)
        raise MemoryError()
    with nogil:
        for p in range(n):
            w = words[p]
            lr = lrs[p]
            for j in range(d):
                v[j] = cue[w, j]
                neu[j] = 0.0
            # all gradients from pre-update values, so repeated targets stay exact
            for i in range(k + 1):
                t = contexts[p] if i == 0 else negatives[p, i - 1]
                f = 0.0
                for j in range(d):
                    f = f + v[j] * ctx[t, j]
                if i == 0:
                    total = total - _log_sigmoid(f)
                    g = _sigmoid(f) - 1.0
                else:
                    total = total - _log_sigmoid(-f)
                    g = _sigmoid(f)
                gs[i] = g
                for j in range(d):
                    neu[j] = neu[j] + g * ctx[t, j]
            for i in range(k + 1):
                t = contexts[p] if i == 0 else negatives[p, i - 1]
                g = lr * gs[i]
                for j in range(d):
                    ctx[t, j] = ctx[t, j] - g * v[j]
            for j in range(d):
                cue[w, j] = cue[w, j] - lr * neu[j]
    free(v); free(neu); free(gs)
    return total


cdef inline void _compose(double[:, ::1] emb, const int64_t[::1] ids, int64_t start,
                          int64_t stop, double* out, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t j
    cdef int64_t q
    for j in range(d):
        out[j] = 0.0
    for q in range(start, stop):
        for j in range(d):
            out[j] = out[j] + emb[ids[q], j]


cdef inline void _apply(double[:, ::1] emb, const int64_t[::1] ids, int64_t start,
                        int64_t stop, double* grad, double lr, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t j
    cdef int64_t q
    for q in range(start, stop):
        for j in range(d):
            emb[ids[q], j] = emb[ids[q], j] - lr * grad[j]


def bicvm_pass(double[:, ::1] src, double[:, ::1] tgt,
               const int64_t[::1] src_offsets, const int64_t[::1] src_ids,
               const int64_t[::1] tgt_offsets, const int64_t[::1] tgt_ids,
               const int64_t[::1] order, const int64_t[::1] noise,
               const double[::1] lrs, double margin):
    """One hinge SGD step per (pair, noise) row; return summed loss.

    Sentences are stored CSR-style: sentence i is ids[offsets[i]:offsets[i+1]].
    """
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t d = src.shape[1]
    cdef Py_ssize_t p, j
    cdef int64_t i, m
    cdef double lr, da, db, hinge, total = 0.0
    if noise.shape[0] != n or lrs.shape[0] != n:
        raise ValueError("pair arrays disagree in length")
    if tgt.shape[1] != d:
        raise ValueError("source and target tables differ in dimension")
    check_csr(src_offsets, src_ids, src.shape[0], "source")
    check_csr(tgt_offsets, tgt_ids, tgt.shape[0], "target")
    check_ids(order, src_offsets.shape[0] - 1, "pair")
    check_ids(noise, tgt_offsets.shape[0] - 1, "noise pair")
    cdef double* buf = <double*> malloc(6 * d * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* re = buf
    cdef double* rf = buf + d
    cdef double* rn = buf + 2 * d
    cdef double* ge = buf + 3 * d
    cdef double* gf = buf + 4 * d
    cdef double* gn = buf + 5 * d
    with nogil:
        for p in range(n):
            i = order[p]
            m = noise[p]
            lr = lrs[p]
            _compose(src, src_ids, src_offsets[i], src_offsets[i + 1], re, d)
            _compose(tgt, tgt_ids, tgt_offsets[i], tgt_offsets[i + 1], rf, d)
            _compose(tgt, tgt_ids, tgt_offsets[m], tgt_offsets[m + 1], rn, d)
            da = 0.0
            db = 0.0
            for j in range(d):
                da = da + (re[j] - rf[j]) * (re[j] - rf[j])
                db = db + (re[j] - rn[j]) * (re[j] - rn[j])
            hinge = margin + da - db
            if hinge <= 0.0:
                continue
            total = total + hinge
            for j in range(d):
                ge[j] = 2.0 * (rn[j] - rf[j])
                gf[j] = -2.0 * (re[j] - rf[j])
                gn[j] = 2.0 * (re[j] - rn[j])
            _apply(src, src_ids, src_offsets[i], src_offsets[i + 1], ge, lr, d)
            _apply(tgt, tgt_ids, tgt_offsets[i], tgt_offsets[i + 1], gf, lr, d)
            _apply(tgt, tgt_ids, tgt_offsets[m], tgt_offsets[m + 1], gn, lr, d)
    free(buf)
    return total
