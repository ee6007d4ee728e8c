"""GRU encoder-decoder translation models with optional attention.

Variants
--------
plain
    A forward GRU reads the source; its final state ``R_S`` conditions every
    decoder step (decoder input = previous target embedding ++ ``R_S``).
attention
    Forward and backward GRUs give per-position annotations
    ``h_j = fwd_j ++ bwd_j``. Each decoder step attends over them,
    ``e_j = v . tanh(W s + U h_j)``, and feeds the context
    ``c = sum_j softmax(e)_j h_j`` together with the previous target embedding.

The decoder state starts at ``tanh(W_init r + b_init)``, where ``r`` is ``R_S``
(plain) or the mean annotation (attention). Output logits are
``W_o s_t + b_o`` over the target vocabulary, or over a candidate subset of it
in sampled mode. Training uses teacher forcing, ``</s>`` is appended to every
target and ``<s>`` is the first decoder input.

Everything is computed on padded batches with masks; gradients are derived
by hand and checked against finite differences in the test-suite.
"""
from __future__ import annotations

import json
import logging
import struct
from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import ParallelCorpus, Vocabulary
from .embstore import EmbeddingSpace
from .numerics import (ParamSet, gru_backward, gru_forward, init_gru, log_softmax,
                       make_rng, sgd_update, softmax, uniform)

log = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
VARIANTS = ("plain", "attention")


@dataclass
class NMTConfig:
    variant: str = "attention"
    dim: int = 64
    hidden: int = 128
    lr: float = 0.5
    epochs: int = 5
    batch: int = 16
    clip: float | None = 5.0
    softmax: str = "full"
    # candidate budget per batch in sampled mode
    budget: int = 1000
    init_scale: float = 0.08
    seed: int = 0

    def validate(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.softmax not in ("full", "sampled"):
            raise ValueError(f"softmax must be 'full' or 'sampled', got {self.softmax!r}")
        if min(self.dim, self.hidden, self.batch, self.budget) < 1 or self.epochs < 0:
            raise ValueError("dim, hidden, batch and budget must be >= 1, epochs >= 0")
        if self.lr <= 0 or (self.clip is not None and self.clip <= 0):
            raise ValueError("lr and clip must be positive")


@dataclass
class SoftmaxPlan:
    """How output probabilities are normalised.

    ``full``: over the whole target vocabulary. ``sampled``: over the batch's
    gold ids plus uniform draws (without replacement) from the rest of the
    vocabulary, up to ``budget`` candidates in total. With a uniform proposal
    the importance weights are constant and cancel, leaving a softmax
    restricted to the candidate set (a biased estimate). ``candidates`` pins
    an explicit set instead of drawing one.
    """
    mode: str = "full"
    budget: int = 0
    candidates: np.ndarray | None = None

    def draw(self, targets, vocab_size: int, rng) -> np.ndarray | None:
        if self.mode == "full":
            return None
        if self.mode != "sampled":
            raise ValueError(f"unknown softmax mode {self.mode!r}")
        if self.candidates is not None:
            return np.unique(np.asarray(self.candidates, dtype=np.int64))
        if self.budget > vocab_size:
            raise ValueError(f"budget {self.budget} exceeds target vocabulary {vocab_size}")
        return candidate_set(targets, vocab_size, self.budget, rng)


def candidate_set(targets, vocab_size: int, budget: int, rng) -> np.ndarray:
    """Sorted gold ids of the batch plus uniform extra ids up to ``budget``."""
    gold = np.unique(np.concatenate([np.asarray(t, dtype=np.int64) for t in targets]))
    extra = budget - len(gold)
    if extra > 0:
        rest = np.setdiff1d(np.arange(vocab_size), gold, assume_unique=True)
        gold = np.union1d(gold, rng.choice(rest, size=min(extra, len(rest)), replace=False))
    return gold


def sampled_logprob(logits, gold_position: int) -> float:
    """-log p(gold) with the softmax normalised over the given logits only."""
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= gold_position < len(logits):
        raise ValueError("gold id is not in the candidate set")
    return float(-log_softmax(logits)[gold_position])


class TranslationModel:
    def __init__(self, variant: str, source_vocab: Vocabulary, target_vocab: Vocabulary,
                 dim: int, hidden: int, params: ParamSet | None = None, seed: int = 0,
                 init_scale: float = 0.08):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
        self.variant = variant
        self.source_vocab = source_vocab
        self.target_vocab = target_vocab.with_tokens([BOS, EOS])
        self.dim = dim
        self.hidden = hidden
        self.bos_id = self.target_vocab.index[BOS]
        self.eos_id = self.target_vocab.index[EOS]
        if params is None:
            params = self._init_params(make_rng(seed), init_scale)
        self.params = params
        self._check_shapes()

    @property
    def attention(self) -> bool:
        return self.variant == "attention"

    @property
    def enc_size(self) -> int:
        return 2 * self.hidden if self.attention else self.hidden

    def _shapes(self) -> dict[str, tuple]:
        d, h, e = self.dim, self.hidden, self.enc_size
        vs, vt = self.source_vocab.size, self.target_vocab.size
        shapes = {"E_s": (vs, d), "E_t": (vt, d)}
        grus = [("enc_f", d), ("dec", d + e)] + ([("enc_b", d)] if self.attention else [])
        for prefix, n_in in grus:
            for g in "zrh":
                shapes[f"{prefix}.W_{g}"] = (h, n_in)
                shapes[f"{prefix}.U_{g}"] = (h, h)
                shapes[f"{prefix}.b_{g}"] = (h,)
        shapes.update({"init.W": (h, e), "init.b": (h,), "out.W": (vt, h), "out.b": (vt,)})
        if self.attention:
            shapes.update({"att.W": (h, h), "att.U": (h, e), "att.v": (h,)})
        return shapes

    def _init_params(self, rng, scale: float) -> ParamSet:
        d, h, e = self.dim, self.hidden, self.enc_size
        p = ParamSet()
        p.add("E_s", uniform(rng, (self.source_vocab.size, d), 0.5 / d))
        p.add("E_t", uniform(rng, (self.target_vocab.size, d), 0.5 / d))
        init_gru(p, "enc_f", d, h, rng, scale)
        if self.attention:
            init_gru(p, "enc_b", d, h, rng, scale)
        init_gru(p, "dec", d + e, h, rng, scale)
        p.add("init.W", uniform(rng, (h, e), scale))
        p.add("init.b", np.zeros(h))
        if self.attention:
            p.add("att.W", uniform(rng, (h, h), scale))
            p.add("att.U", uniform(rng, (h, e), scale))
            p.add("att.v", uniform(rng, (h,), scale))
        p.add("out.W", uniform(rng, (self.target_vocab.size, h), scale))
        p.add("out.b", np.zeros(self.target_vocab.size))
        return p

    def _check_shapes(self):
        expected = self._shapes()
        if set(expected) != set(self.params.names()):
            missing = set(expected) ^ set(self.params.names())
            raise ValueError(f"parameter names do not match the {self.variant} variant: "
                             f"{sorted(missing)}")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ValueError(f"{name} has shape {self.params[name].shape}, expected {shape}")

    def config(self) -> dict:
        return {"variant": self.variant, "dim": self.dim, "hidden": self.hidden,
                "source_vocab": self.source_vocab.to_dict(),
                "target_vocab": self.target_vocab.to_dict()}


@dataclass
class EncodedSource:
    variant: str
    # plain: (h,) final state; attention: (n, 2h) annotations
    summary: np.ndarray | None = None
    annotations: np.ndarray | None = None


# --- batched forward / backward --------------------------------------------

def _pad(seqs, fill: int = 0):
    lengths = np.array([len(s) for s in seqs])
    out = np.full((len(seqs), lengths.max()), fill, dtype=np.int64)
    for i, s in enumerate(seqs):
        out[i, :len(s)] = s
    mask = (np.arange(lengths.max())[None, :] < lengths[:, None]).astype(np.float64)
    return out, mask, lengths


def _encode_batch(model: TranslationModel, sources):
    P = model.params
    S, ms, lengths = _pad(sources)
    if (lengths == 0).any():
        raise ValueError("empty source sentence")
    X = P["E_s"][S]
    B, T = S.shape
    h = model.hidden
    fwd_p = P.slice("enc_f")
    state = np.zeros((B, h))
    fwd, fwd_cache = np.empty((B, T, h)), []
    for t in range(T):
        new, cache = gru_forward(fwd_p, X[:, t], state)
        m = ms[:, t, None]
        state = m * new + (1.0 - m) * state
        fwd[:, t] = state
        fwd_cache.append(cache)
    enc = {"S": S, "ms": ms, "lengths": lengths, "fwd_cache": fwd_cache}
    if not model.attention:
        enc["summary"] = state
        return enc
    bwd_p = P.slice("enc_b")
    state = np.zeros((B, h))
    bwd, bwd_cache = np.empty((B, T, h)), [None] * T
    for t in range(T - 1, -1, -1):
        new, cache = gru_forward(bwd_p, X[:, t], state)
        m = ms[:, t, None]
        state = m * new + (1.0 - m) * state
        bwd[:, t] = state
        bwd_cache[t] = cache
    H = np.concatenate([fwd, bwd], axis=2)
    enc.update(H=H, bwd_cache=bwd_cache,
               summary=(H * ms[:, :, None]).sum(axis=1) / lengths[:, None])
    return enc


def _attend_batch(P, s, H, UH, ms):
    pre = np.tanh((s @ P["att.W"].T)[:, None, :] + UH)
    scores = pre @ P["att.v"]
    scores = np.where(ms > 0, scores, -np.inf)
    alpha = softmax(scores)
    ctx = np.einsum("bt,btk->bk", alpha, H)
    return alpha, ctx, pre


def _forward(model: TranslationModel, sources, targets, candidates=None, keep=True):
    """Teacher-forced summed loss over the batch plus whatever backward needs."""
    P = model.params
    enc = _encode_batch(model, sources)
    Y, mt, _ = _pad([np.append(np.asarray(t, dtype=np.int64), model.eos_id) for t in targets])
    Yin = np.concatenate([np.full((len(Y), 1), model.bos_id), Y[:, :-1]], axis=1)
    B, T = Y.shape
    d = model.dim
    if candidates is None:
        W_o, b_o, gold = P["out.W"], P["out.b"], Y
    else:
        lookup = np.full(model.target_vocab.size, -1, dtype=np.int64)
        lookup[candidates] = np.arange(len(candidates))
        gold = lookup[Y]
        if (gold[mt > 0] < 0).any():
            raise ValueError("gold id is not in the candidate set")
        gold = np.where(mt > 0, gold, 0)
        W_o, b_o = P["out.W"][candidates], P["out.b"][candidates]

    summary = enc["summary"]
    s = np.tanh(summary @ P["init.W"].T + P["init.b"])
    steps = {"s0": s, "dec": [], "att": [], "probs": [], "states": []}
    dec_p = P.slice("dec")
    UH = enc["H"] @ P["att.U"].T if model.attention else None
    loss = 0.0
    rows = np.arange(B)
    for t in range(T):
        e_prev = P["E_t"][Yin[:, t]]
        if model.attention:
            alpha, ctx, pre = _attend_batch(P, s, enc["H"], UH, enc["ms"])
            steps["att"].append((alpha, pre))
        else:
            ctx = summary
        s, cache = gru_forward(dec_p, np.concatenate([e_prev, ctx], axis=1), s)
        logits = s @ W_o.T + b_o
        logp = log_softmax(logits)
        loss = loss - (logp[rows, gold[:, t]] * mt[:, t]).sum()
        if keep:
            steps["dec"].append(cache)
            steps["states"].append(s)
            steps["probs"].append(np.exp(logp))
    ctx = dict(enc=enc, steps=steps, Y=Y, Yin=Yin, mt=mt, gold=gold, W_o=W_o,
               candidates=candidates, d=d)
    return loss, ctx


def _backward(model: TranslationModel, ctx, scale: float = 1.0):
    P, G = model.params.params, model.params.grads
    enc, steps = ctx["enc"], ctx["steps"]
    mt, gold, Yin, W_o, cand, d = ctx["mt"], ctx["gold"], ctx["Yin"], ctx["W_o"], ctx["candidates"], ctx["d"]
    B, T = mt.shape
    rows = np.arange(B)
    dec_p, dec_g = model.params.slice("dec"), model.params.grad_slice("dec")
    gW_o = np.zeros_like(W_o)
    gb_o = np.zeros(W_o.shape[0])
    ds = np.zeros((B, model.hidden))
    if model.attention:
        H = enc["H"]
        dH = np.zeros_like(H)
    else:
        d_summary = np.zeros((B, model.hidden))
    for t in range(T - 1, -1, -1):
        dlogits = steps["probs"][t].copy()
        dlogits[rows, gold[:, t]] -= 1.0
        dlogits *= (scale * mt[:, t])[:, None]
        s_t = steps["states"][t]
        gW_o += dlogits.T @ s_t
        gb_o += dlogits.sum(axis=0)
        ds = ds + dlogits @ W_o
        dx, ds = gru_backward(dec_p, dec_g, steps["dec"][t], ds)
        np.add.at(G["E_t"], Yin[:, t], dx[:, :d])
        dctx = dx[:, d:]
        if not model.attention:
            d_summary += dctx
            continue
        alpha, pre = steps["att"][t]
        s_prev = steps["states"][t - 1] if t > 0 else steps["s0"]
        dH += alpha[:, :, None] * dctx[:, None, :]
        dalpha = np.einsum("btk,bk->bt", H, dctx)
        dscores = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
        G["att.v"] += np.einsum("bt,bta->a", dscores, pre)
        dA = dscores[:, :, None] * P["att.v"] * (1.0 - pre * pre)
        dA_sum = dA.sum(axis=1)
        G["att.W"] += dA_sum.T @ s_prev
        ds += dA_sum @ P["att.W"]
        G["att.U"] += np.einsum("bta,btk->ak", dA, H)
        dH += dA @ P["att.U"]
    if cand is None:
        G["out.W"] += gW_o
        G["out.b"] += gb_o
    else:
        G["out.W"][cand] += gW_o
        G["out.b"][cand] += gb_o

    s0 = steps["s0"]
    da0 = ds * (1.0 - s0 * s0)
    G["init.W"] += da0.T @ enc["summary"]
    G["init.b"] += da0.sum(axis=0)
    dsum = da0 @ P["init.W"]

    S, ms, lengths = enc["S"], enc["ms"], enc["lengths"]
    h = model.hidden
    if model.attention:
        dH += (ms / lengths[:, None])[:, :, None] * dsum[:, None, :]
        _encoder_backward(model, "enc_f", enc["fwd_cache"], S, ms, dH[:, :, :h], range(S.shape[1] - 1, -1, -1))
        _encoder_backward(model, "enc_b", enc["bwd_cache"], S, ms, dH[:, :, h:], range(S.shape[1]))
    else:
        per_step = np.zeros((B, S.shape[1], h))
        per_step[:, -1] = d_summary + dsum
        _encoder_backward(model, "enc_f", enc["fwd_cache"], S, ms, per_step, range(S.shape[1] - 1, -1, -1))


def _encoder_backward(model, prefix, caches, S, ms, d_states, order):
    """Backprop through one masked encoder direction; ``order`` reverses its scan."""
    p, g = model.params.slice(prefix), model.params.grad_slice(prefix)
    G = model.params.grads
    carry = np.zeros((d_states.shape[0], d_states.shape[2]))
    for t in order:
        carry = carry + d_states[:, t]
        m = ms[:, t, None]
        dx, dprev = gru_backward(p, g, caches[t], m * carry)
        carry = (1.0 - m) * carry + dprev
        np.add.at(G["E_s"], S[:, t], dx)


def batch_loss(model: TranslationModel, pairs, candidates=None, backward: bool = True,
               scale: float = 1.0) -> float:
    """Summed teacher-forced loss of ``pairs``; with ``backward`` accumulates
    ``scale`` times its gradient into ``model.params.grads``."""
    sources = [s for s, _ in pairs]
    targets = [t for _, t in pairs]
    loss, ctx = _forward(model, sources, targets, candidates, keep=backward)
    if backward:
        _backward(model, ctx, scale)
    return loss


# --- single-instance API ----------------------------------------------------

def encode(model: TranslationModel, source) -> EncodedSource:
    source = np.asarray(source, dtype=np.int64)
    if len(source) == 0:
        raise ValueError("empty source sentence")
    enc = _encode_batch(model, [source])
    if model.attention:
        return EncodedSource(model.variant, annotations=enc["H"][0])
    return EncodedSource(model.variant, summary=enc["summary"][0])


def attend(model: TranslationModel, state, annotations):
    """Attention weights over ``annotations`` (n, 2h) and the context vector."""
    if not model.attention:
        raise ValueError("attend() needs the attention variant")
    P = model.params
    H = np.asarray(annotations, dtype=np.float64)[None]
    s = np.asarray(state, dtype=np.float64)[None]
    alpha, ctx, _ = _attend_batch(P, s, H, H @ P["att.U"].T, np.ones(H.shape[:2]))
    return alpha[0], ctx[0]


def sequence_loss(model: TranslationModel, pair, plan: SoftmaxPlan | None = None,
                  rng=None, backward: bool = False) -> float:
    """-sum_t log P(y_t | y_<t, source) of one pair under ``plan``."""
    plan = plan or SoftmaxPlan()
    source, target = pair
    target = np.append(np.asarray(target, dtype=np.int64), model.eos_id)
    cand = plan.draw([target], model.target_vocab.size, rng if rng is not None else make_rng(0))
    return batch_loss(model, [(source, target[:-1])], cand, backward=backward)


def translate_greedy(model: TranslationModel, source, max_len: int) -> list[int]:
    """Argmax decoding; the returned ids end with ``</s>`` when it was emitted."""
    out: list[int] = []
    if max_len <= 0:
        return out
    P = model.params
    enc = _encode_batch(model, [np.asarray(source, dtype=np.int64)])
    s = np.tanh(enc["summary"] @ P["init.W"].T + P["init.b"])
    UH = enc["H"] @ P["att.U"].T if model.attention else None
    dec_p = P.slice("dec")
    prev = model.bos_id
    for _ in range(max_len):
        e_prev = P["E_t"][[prev]]
        if model.attention:
            _, ctx, _ = _attend_batch(P, s, enc["H"], UH, enc["ms"])
        else:
            ctx = enc["summary"]
        s, _ = gru_forward(dec_p, np.concatenate([e_prev, ctx], axis=1), s)
        prev = int(np.argmax(s[0] @ P["out.W"].T + P["out.b"]))
        out.append(prev)
        if prev == model.eos_id:
            break
    return out


def export_embeddings(model: TranslationModel, side: str = "source") -> EmbeddingSpace:
    if side == "source":
        return EmbeddingSpace(model.source_vocab, model.params["E_s"].copy())
    if side == "target":
        return EmbeddingSpace(model.target_vocab, model.params["E_t"].copy())
    raise ValueError(f"side must be 'source' or 'target', got {side!r}")


# --- training ----------------------------------------------------------------

@dataclass
class TrainResult:
    model: TranslationModel
    epoch_losses: list[float] = field(default_factory=list)


def train(corpus: ParallelCorpus, config: NMTConfig | None = None, callback=None) -> TrainResult:
    """Minibatch SGD with global-norm clipping on the mean per-pair loss.

    ``callback(epoch, model, mean_loss)`` runs after every epoch.
    """
    config = config or NMTConfig()
    config.validate()
    pairs = [(s, t) for s, t in corpus.pairs if len(s)]
    if not pairs:
        raise ValueError("empty corpus")
    rng = make_rng(config.seed)
    model = TranslationModel(config.variant, corpus.source_vocab, corpus.target_vocab,
                             config.dim, config.hidden, seed=int(rng.integers(2**63)),
                             init_scale=config.init_scale)
    plan = SoftmaxPlan(config.softmax, min(config.budget, model.target_vocab.size))
    result = TrainResult(model)
    n = len(pairs)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch):
            batch = [pairs[i] for i in order[start:start + config.batch]]
            targets = [np.append(t, model.eos_id) for _, t in batch]
            cand = plan.draw(targets, model.target_vocab.size, rng)
            total += batch_loss(model, batch, cand, scale=1.0 / len(batch))
            sgd_update(model.params, config.lr, config.clip)
        result.epoch_losses.append(total / n)
        log.info("nmt epoch %d: mean loss %.4f", epoch + 1, result.epoch_losses[-1])
        if callback is not None:
            callback(epoch, model, result.epoch_losses[-1])
    return result


# --- checkpoints ---------------------------------------------------------------
#
# Layout (all integers little-endian):
#   8 bytes   magic b"TEMBCKP1"
#   uint32    length of the UTF-8 JSON header, then the header itself
#             (variant, dim, hidden, both vocabularies, training config)
#   uint32    number of matrices, then per matrix:
#     uint16 name length, name (UTF-8), uint32 rows, uint32 cols,
#     rows*cols float64 values in row-major order
# Vectors are stored as rows=n, cols=1.

MAGIC = b"TEMBCKP1"


def save_checkpoint(model: TranslationModel, path, extra: dict | None = None):
    shapes = {name: list(value.shape) for name, value in model.params.items()}
    header = dict(model.config(), shapes=shapes, extra=extra or {})
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        f.write(struct.pack("<I", len(shapes)))
        for name, value in model.params.items():
            raw = name.encode("utf-8")
            rows, cols = (value.shape[0], 1) if value.ndim == 1 else value.shape
            f.write(struct.pack("<H", len(raw)))
            f.write(raw)
            f.write(struct.pack("<II", rows, cols))
            f.write(np.ascontiguousarray(value, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[TranslationModel, dict]:
    """Returns the model and the free-form ``extra`` dict saved with it."""
    with open(path, "rb") as f:
        if f.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        (n,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(n).decode("utf-8"))
        (count,) = struct.unpack("<I", f.read(4))
        params = ParamSet()
        for _ in range(count):
            (k,) = struct.unpack("<H", f.read(2))
            name = f.read(k).decode("utf-8")
            rows, cols = struct.unpack("<II", f.read(8))
            buf = f.read(8 * rows * cols)
            if len(buf) != 8 * rows * cols:
                raise ValueError(f"{path}: truncated matrix {name}")
            value = np.frombuffer(buf, dtype="<f8").astype(np.float64)
            params.add(name, value.reshape(header["shapes"][name]))
    model = TranslationModel(header["variant"], Vocabulary.from_dict(header["source_vocab"]),
                             Vocabulary.from_dict(header["target_vocab"]), header["dim"],
                             header["hidden"], params=params)
    return model, header.get("extra", {})


def config_dict(config: NMTConfig) -> dict:
    return asdict(config)
