"""Backend selection for the batch gauge kernels.

The compiled extension ``njclab._ckernels`` is used when it was built;
otherwise (or when ``NJCLAB_PURE_PYTHON=1``) the numpy module
``njclab._pykernels`` takes over.  Both expose the same three functions.
"""
import importlib
import os

import numpy as np

from njclab import _pykernels
from njclab._pykernels import ASYM_SUM, BLOCK_P, FRAC_POWER, NORM_P, NORM_PLUS_SQUARE, TRUNCATED

__all__ = [
    "BACKEND", "NORM_P", "TRUNCATED", "FRAC_POWER", "NORM_PLUS_SQUARE", "ASYM_SUM", "BLOCK_P",
    "load_backend", "available_backends", "gauge_batch", "ratio_batch", "refine_pairs",
]


def load_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("njclab._ckernels")
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("NJCLAB_PURE_PYTHON") == "1":
    _impl, BACKEND = _pykernels, "python"
else:
    try:
        _impl, BACKEND = load_backend("cython"), "cython"
    except ImportError:
        _impl, BACKEND = _pykernels, "python"


def gauge_batch(kernel, X):
    return _impl.gauge_batch(kernel.kind, kernel.array(), X)


def _per_row(v, n):
    return np.array(np.broadcast_to(np.asarray(v, dtype=np.float64), (n,)), dtype=np.float64)


def ratio_batch(kernel, X, Y, sigma, delta):
    delta = _per_row(delta, len(X))
    return _impl.ratio_batch(kernel.kind, kernel.array(), X, Y, float(sigma), delta)


def refine_pairs(kernel, X0, Y0, sigma, delta, noise, step0, decay):
    delta, step0 = _per_row(delta, len(X0)), _per_row(step0, len(X0))
    return _impl.refine_pairs(kernel.kind, kernel.array(), X0, Y0, float(sigma), delta, noise, step0, float(decay))
