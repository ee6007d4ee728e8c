"""Independent reference computations used by the tests.

Everything here is written from the defining formulas with plain Python
loops (or ``decimal`` for high precision) and shares no code with the
package under test.
"""
from __future__ import annotations

import itertools
import math
from decimal import Decimal, getcontext


def softmax_decimal(xs, digits=50):
    getcontext().prec = digits
    es = [Decimal(x).exp() for x in xs]
    total = sum(es)
    return [float(e / total) for e in es]


def ranks_bruteforce(xs):
    """Average 1-based rank: 1 + #smaller + (#equal - 1) / 2."""
    out = []
    for x in xs:
        smaller = sum(1 for y in xs if y < x)
        equal = sum(1 for y in xs if y == x)
        out.append(1 + smaller + (equal - 1) / 2)
    return out


def pearson(xs, ys):
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    return sxy / math.sqrt(sxx * syy)


def spearman_oracle(xs, ys):
    return pearson(ranks_bruteforce(list(xs)), ranks_bruteforce(list(ys)))


def _norm(v):
    return math.sqrt(math.fsum(x * x for x in v))


def cos(u, v):
    nu, nv = _norm(u), _norm(v)
    return math.fsum(a * b for a, b in zip(u, v)) / (nu * nv)


def toefl_oracle(vectors: dict, questions, allowed=None):
    """Accuracy over retained questions with strict-max scoring, or None."""
    correct = retained = 0
    for cue, choices, answer in questions:
        words = [cue, *choices]
        if not all(w in vectors and _norm(vectors[w]) > 0 and (allowed is None or w in allowed)
                   for w in words):
            continue
        retained += 1
        scores = [cos(vectors[cue], vectors[c]) for c in choices]
        best = max(scores)
        if scores[answer] == best and scores.count(best) == 1:
            correct += 1
    return None if retained == 0 else (correct, retained)


def analogy_oracle(vectors: dict, questions, allowed=None):
    """Exhaustive search: per category (correct, retained)."""
    usable = {w for w, v in vectors.items() if _norm(v) > 0 and (allowed is None or w in allowed)}
    unit = {w: [x / _norm(v) for x in v] for w, v in vectors.items() if w in usable}
    out = {}
    for a, b, c, d, cat in questions:
        if not {a, b, c, d} <= usable:
            continue
        target = [uc + ub - ua for ua, ub, uc in zip(unit[a], unit[b], unit[c])]
        best, best_words = -math.inf, []
        for w in sorted(usable - {a, b, c}):
            s = cos(target, unit[w]) if _norm(target) > 0 else 0.0
            if s > best:
                best, best_words = s, [w]
            elif s == best:
                best_words.append(w)
        ok, n = out.get(cat, (0, 0))
        out[cat] = (ok + (best_words == [d]), n + 1)
    return out


def dice_oracle(pairs):
    """{(s, t): dice} from raw token lists by exhaustive counting."""
    src_vocab = sorted({w for s, _ in pairs for w in s})
    tgt_vocab = sorted({w for _, t in pairs for w in t})
    out = {}
    for s, t in itertools.product(src_vocab, tgt_vocab):
        cs = sum(1 for a, _ in pairs if s in a)
        ct = sum(1 for _, b in pairs if t in b)
        cst = sum(1 for a, b in pairs if s in a and t in b)
        if cst:
            out[(s, t)] = 2 * cst / (cs + ct)
    return out


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def gru_oracle(W, U, b, x, h):
    """W, U, b: dicts keyed z/r/h of nested lists; four formulas spelled out."""
    def affine(M, v):
        return [math.fsum(m * e for m, e in zip(row, v)) for row in M]

    n = len(h)
    z = [sigmoid(a + c + d) for a, c, d in zip(affine(W["z"], x), affine(U["z"], h), b["z"])]
    r = [sigmoid(a + c + d) for a, c, d in zip(affine(W["r"], x), affine(U["r"], h), b["r"])]
    rh = [r[i] * h[i] for i in range(n)]
    hc = [math.tanh(a + c + d) for a, c, d in zip(affine(W["h"], x), affine(U["h"], rh), b["h"])]
    return [(1 - z[i]) * h[i] + z[i] * hc[i] for i in range(n)]
