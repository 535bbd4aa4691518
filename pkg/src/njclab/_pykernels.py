"""Pure numpy implementation of the batch gauge kernels.

Semantics must match ``_ckernels.pyx`` operation for operation; the two are
compared in ``tests/test_kernels.py``.
"""
import numpy as np

NORM_P = 0
TRUNCATED = 1
FRAC_POWER = 2
NORM_PLUS_SQUARE = 3
ASYM_SUM = 4
BLOCK_P = 5


def _pnorm(X, p):
    A = np.abs(X)
    if np.isinf(p):
        return A.max(axis=1)
    if p == 1.0:
        return A.sum(axis=1)
    if p == 2.0:
        return np.sqrt((X * X).sum(axis=1))
    return (A**p).sum(axis=1) ** (1.0 / p)


def _combine(F, p):
    # F holds nonnegative block values
    if np.isinf(p):
        return F.max(axis=1)
    if p == 1.0:
        return F.sum(axis=1)
    if p == 2.0:
        return np.sqrt((F * F).sum(axis=1))
    return (F**p).sum(axis=1) ** (1.0 / p)


def gauge_batch(kind, params, X):
    X = np.asarray(X, dtype=np.float64)
    if kind == NORM_P:
        return _pnorm(X, params[0])
    if kind == TRUNCATED:
        return np.minimum(np.sqrt((X * X).sum(axis=1)), params[0])
    if kind == FRAC_POWER:
        return np.sqrt((X * X).sum(axis=1)) ** params[0]
    if kind == NORM_PLUS_SQUARE:
        sq = (X * X).sum(axis=1)
        return np.sqrt(sq) + sq
    if kind == ASYM_SUM:
        nrm = np.sqrt((X * X).sum(axis=1))
        c = X @ np.asarray(params, dtype=np.float64)
        return np.where(c >= 0.0, nrm + c, nrm - 4.0 * c)
    if kind == BLOCK_P:
        outer = params[0]
        nblocks = int(params[1])
        cols = []
        start = 0
        for b in range(nblocks):
            size = int(params[2 + 2 * b])
            cols.append(_pnorm(X[:, start : start + size], params[3 + 2 * b]))
            start += size
        return _combine(np.stack(cols, axis=1), outer)
    raise ValueError(f"unknown kernel kind {kind}")


def ratio_from_gauge(gauge, X, Y, sigma, delta):
    """Ratio for each row pair given a batch gauge; NaN where the denominator is <= ``delta``."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    fx = gauge(X)
    fy = gauge(Y)
    fs = gauge(X + Y)
    fd = gauge(X - Y)
    den = fx**sigma + fy**sigma
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (fs**sigma + fd**sigma) / (2.0 ** (sigma - 1.0) * den)
    return np.where(den > np.broadcast_to(delta, den.shape), r, np.nan)


def ratio_batch(kind, params, X, Y, sigma, delta):
    return ratio_from_gauge(lambda Z: gauge_batch(kind, params, Z), X, Y, sigma, delta)


def refine_from_gauge(gauge, X0, Y0, sigma, delta, noise, step0, decay):
    """Accept-if-better random perturbation, one independent chain per row.

    ``noise`` has shape ``(K, steps, 2 * dim)``; the step of a chain is
    multiplied by ``decay`` after every rejected move.
    """
    X = np.array(X0, dtype=np.float64, copy=True)
    Y = np.array(Y0, dtype=np.float64, copy=True)
    K, dim = X.shape
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), (K,))
    val = ratio_from_gauge(gauge, X, Y, sigma, delta)
    val = np.where(np.isnan(val), -np.inf, val)
    step = np.array(np.broadcast_to(step0, (K,)), dtype=np.float64)
    for k in range(noise.shape[1]):
        mag = np.maximum(np.abs(X).max(axis=1), np.abs(Y).max(axis=1))
        s = (step * np.maximum(mag, 1e-300))[:, None]
        Xc = X + s * noise[:, k, :dim]
        Yc = Y + s * noise[:, k, dim:]
        rc = ratio_from_gauge(gauge, Xc, Yc, sigma, delta)
        better = rc > val  # NaN compares False
        X[better] = Xc[better]
        Y[better] = Yc[better]
        val[better] = rc[better]
        step[~better] *= decay
    return X, Y, val


def refine_pairs(kind, params, X0, Y0, sigma, delta, noise, step0, decay):
    return refine_from_gauge(lambda Z: gauge_batch(kind, params, Z), X0, Y0, sigma, delta, noise, step0, decay)
