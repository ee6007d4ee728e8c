"""Argument validation shared by both kernel backends."""
import numpy as np


def check_ids(ids, limit: int, what: str):
    a = np.asarray(ids)
    if a.size and (a.min() < 0 or a.max() >= limit):
        raise ValueError(f"{what} id outside [0, {limit})")


def check_csr(offsets, ids, limit: int, what: str):
    off = np.asarray(offsets)
    if len(off) == 0 or off[0] != 0 or off[-1] != len(ids) or (np.diff(off) < 0).any():
        raise ValueError(f"malformed {what} offsets")
    check_ids(ids, limit, what)
