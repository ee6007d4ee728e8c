"""Dense numerics shared by the trainers.

Matrices are float64 numpy arrays. Randomness always comes from a
``numpy.random.Generator`` on the PCG64 bit generator built by :func:`make_rng`,
so an integer seed fully determines every stream.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

import numpy as np

DTYPE = np.float64

GRU_NAMES = ("W_z", "U_z", "b_z", "W_r", "U_r", "b_r", "W_h", "U_h", "b_h")


class GradientOverflow(FloatingPointError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def uniform(rng: np.random.Generator, shape, scale: float) -> np.ndarray:
    return rng.uniform(-scale, scale, size=shape).astype(DTYPE)


class ParamSet:
    """Named parameter arrays with same-shaped gradient accumulators."""

    def __init__(self, params: Mapping[str, np.ndarray] | None = None):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        for name, value in (params or {}).items():
            self.add(name, value)

    def add(self, name: str, value) -> np.ndarray:
        if name in self.params:
            raise ValueError(f"duplicate parameter name {name!r}")
        arr = np.array(value, dtype=DTYPE)
        self.params[name] = arr
        self.grads[name] = np.zeros_like(arr)
        return arr

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def __iter__(self):
        return iter(self.params)

    def names(self) -> list[str]:
        return list(self.params)

    def items(self):
        return self.params.items()

    def zero_grad(self):
        for g in self.grads.values():
            g.fill(0.0)

    def grad_norm(self) -> float:
        return math.sqrt(sum(float(np.vdot(g, g)) for g in self.grads.values()))

    def slice(self, prefix: str) -> dict[str, np.ndarray]:
        """Parameters named ``prefix.X`` as a ``{X: array}`` view (no copies)."""
        p = prefix + "."
        return {k[len(p):]: v for k, v in self.params.items() if k.startswith(p)}

    def grad_slice(self, prefix: str) -> dict[str, np.ndarray]:
        p = prefix + "."
        return {k[len(p):]: v for k, v in self.grads.items() if k.startswith(p)}

    def copy(self) -> "ParamSet":
        out = ParamSet()
        for k, v in self.params.items():
            out.add(k, v.copy())
        return out

    def size(self) -> int:
        return sum(v.size for v in self.params.values())


def as_floats(x) -> np.ndarray:
    # keeps float64 / longdouble as given; everything else becomes float64
    x = np.asarray(x)
    return x if np.issubdtype(x.dtype, np.floating) else x.astype(DTYPE)


def softmax(logits) -> np.ndarray:
    """Softmax along the last axis, max-subtracted."""
    x = as_floats(logits)
    if x.size == 0 or x.shape[-1] == 0:
        raise ValueError("softmax of an empty vector")
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits) -> np.ndarray:
    x = as_floats(logits)
    if x.size == 0 or x.shape[-1] == 0:
        raise ValueError("softmax of an empty vector")
    m = x.max(axis=-1, keepdims=True)
    return x - m - np.log(np.exp(x - m).sum(axis=-1, keepdims=True))


def sigmoid(x):
    # tanh form is overflow-free for any finite input
    return 0.5 * (1.0 + np.tanh(0.5 * as_floats(x)))


def log_sigmoid(x):
    return -np.logaddexp(0.0, -as_floats(x))


# --- gated recurrent unit -------------------------------------------------

def init_gru(params: ParamSet, prefix: str, n_in: int, n_hidden: int,
             rng: np.random.Generator, scale: float = 0.08):
    for g in ("z", "r", "h"):
        params.add(f"{prefix}.W_{g}", uniform(rng, (n_hidden, n_in), scale))
        params.add(f"{prefix}.U_{g}", uniform(rng, (n_hidden, n_hidden), scale))
        params.add(f"{prefix}.b_{g}", np.zeros(n_hidden))


def _check_gru_shapes(p: Mapping[str, np.ndarray], n_in: int, n_hidden: int):
    for name in GRU_NAMES:
        if name not in p:
            raise ValueError(f"missing GRU parameter {name}")
    for g in "zrh":
        W, U, b = p[f"W_{g}"], p[f"U_{g}"], p[f"b_{g}"]
        if W.shape != (n_hidden, n_in):
            raise ValueError(f"W_{g} has shape {W.shape}, expected {(n_hidden, n_in)}")
        if U.shape != (n_hidden, n_hidden):
            raise ValueError(f"U_{g} has shape {U.shape}, expected {(n_hidden, n_hidden)}")
        if b.shape != (n_hidden,):
            raise ValueError(f"b_{g} has shape {b.shape}, expected {(n_hidden,)}")


def gru_forward(p: Mapping[str, np.ndarray], x: np.ndarray, h: np.ndarray):
    """One GRU step on a vector or a (batch, n) block; returns (h_new, cache)."""
    x = as_floats(x)
    h = as_floats(h)
    _check_gru_shapes(p, x.shape[-1], h.shape[-1])
    z = sigmoid(x @ p["W_z"].T + h @ p["U_z"].T + p["b_z"])
    r = sigmoid(x @ p["W_r"].T + h @ p["U_r"].T + p["b_r"])
    rh = r * h
    hc = np.tanh(x @ p["W_h"].T + rh @ p["U_h"].T + p["b_h"])
    h_new = (1.0 - z) * h + z * hc
    return h_new, (x, h, z, r, rh, hc)


def gru_step(p: Mapping[str, np.ndarray], x, h) -> np.ndarray:
    """h' = (1 - z) * h + z * tanh(W x + U (r * h) + b), z and r sigmoid gates."""
    return gru_forward(p, x, h)[0]


def gru_backward(p: Mapping[str, np.ndarray], g: Mapping[str, np.ndarray], cache, dh_new):
    """Accumulate parameter gradients into ``g``; return (dx, dh_prev)."""
    x, h, z, r, rh, hc = cache
    dhc = dh_new * z
    dz = dh_new * (hc - h)
    dh = dh_new * (1.0 - z)

    da_h = dhc * (1.0 - hc * hc)
    _acc_outer(g["W_h"], da_h, x)
    _acc_outer(g["U_h"], da_h, rh)
    g["b_h"] += da_h.sum(axis=0) if da_h.ndim == 2 else da_h
    dx = da_h @ p["W_h"]
    drh = da_h @ p["U_h"]
    dr = drh * h
    dh += drh * r

    da_z = dz * z * (1.0 - z)
    da_r = dr * r * (1.0 - r)
    for name, da in (("z", da_z), ("r", da_r)):
        _acc_outer(g[f"W_{name}"], da, x)
        _acc_outer(g[f"U_{name}"], da, h)
        g[f"b_{name}"] += da.sum(axis=0) if da.ndim == 2 else da
        dx += da @ p[f"W_{name}"]
        dh += da @ p[f"U_{name}"]
    return dx, dh


def _acc_outer(target: np.ndarray, a: np.ndarray, b: np.ndarray):
    if a.ndim == 1:
        target += np.outer(a, b)
    else:
        target += a.T @ b


# --- optimisation ---------------------------------------------------------

def sgd_update(params: ParamSet, learning_rate: float, clip_norm: float | None = None) -> float:
    """theta -= lr * grad after optional global-norm clipping; zeroes gradients.

    Returns the pre-clipping global gradient norm.
    """
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    norm = params.grad_norm()
    if not math.isfinite(norm):
        raise GradientOverflow("gradient overflow")
    scale = learning_rate
    if clip_norm is not None and norm > clip_norm:
        scale *= clip_norm / norm
    for name, value in params.params.items():
        value -= scale * params.grads[name]
    params.zero_grad()
    return norm


def grad_check(loss_fn: Callable[[ParamSet], float], params: ParamSet, epsilon: float = 1e-5,
               n_samples: int | None = None, rng: np.random.Generator | None = None,
               names: Iterable[str] | None = None, extended: bool = True,
               value_fn: Callable[[ParamSet], float] | None = None) -> float:
    """Compare analytic gradients with central differences.

    ``loss_fn(params)`` returns the loss and accumulates its analytic gradient
    into ``params.grads``. With ``n_samples`` set, that many coordinates per
    parameter are drawn from ``rng``; otherwise every coordinate is checked.
    Returns max |a - n| / max(|a|, |n|, 1e-8). Points where the loss is not
    differentiable must be avoided by the caller.

    With ``extended`` the perturbed losses are evaluated on ``np.longdouble``
    copies of the parameters (80-bit on x86), which keeps roundoff in the
    difference quotient far below the tolerance even for gradients near 1e-7.
    ``loss_fn`` must then not force its result through float64.
    ``value_fn``, when given, computes the loss alone for the perturbed points.
    """
    params.zero_grad()
    loss_fn(params)
    analytic = {k: v.copy() for k, v in params.grads.items()}
    params.zero_grad()
    value_fn = value_fn or loss_fn
    rng = rng if rng is not None else make_rng(0)
    originals = params.params
    if extended:
        params.params = {k: v.astype(np.longdouble) for k, v in originals.items()}
    worst = 0.0
    try:
        for name in (names if names is not None else params.names()):
            flat = params.params[name].reshape(-1)
            if n_samples is None or n_samples >= flat.size:
                coords = range(flat.size)
            else:
                coords = rng.choice(flat.size, size=n_samples, replace=False)
            for i in coords:
                old = flat[i]
                flat[i] = old + epsilon
                up = value_fn(params)
                flat[i] = old - epsilon
                down = value_fn(params)
                flat[i] = old
                num = float((up - down) / (2 * epsilon))
                a = float(analytic[name].reshape(-1)[i])
                worst = max(worst, abs(a - num) / max(abs(a), abs(num), 1e-8))
    finally:
        params.params = originals
        params.zero_grad()
    return worst
