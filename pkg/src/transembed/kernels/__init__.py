"""SGD inner loops, compiled when available.

The Cython extension ``_fast`` is preferred; ``_slow`` is the pure-Python
fallback, selected automatically when the extension is missing or forced with
the environment variable ``TRANSEMBED_PURE_PYTHON=1``.
"""
import os

from . import _slow

try:
    from . import _fast
except ImportError:  # extension not built
    _fast = None

if _fast is not None and not os.environ.get("TRANSEMBED_PURE_PYTHON"):
    _impl = _fast
    BACKEND = "cython"
else:
    _impl = _slow
    BACKEND = "python"

sgns_pass = _impl.sgns_pass
bicvm_pass = _impl.bicvm_pass


def available_backends():
    return ["cython", "python"] if _fast is not None else ["python"]


def get_backend(name: str):
    """Kernel module by name: ``"cython"`` or ``"python"``."""
    if name == "python":
        return _slow
    if name == "cython":
        if _fast is None:
            raise ImportError("compiled kernels are not built")
        return _fast
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "sgns_pass", "bicvm_pass", "available_backends", "get_backend"]
