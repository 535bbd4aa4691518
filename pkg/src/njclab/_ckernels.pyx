# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch gauge kernels; mirrors ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, fabs, isinf, INFINITY, NAN

cnp.import_array()

cdef enum:
    NORM_P = 0
    TRUNCATED = 1
    FRAC_POWER = 2
    NORM_PLUS_SQUARE = 3
    ASYM_SUM = 4
    BLOCK_P = 5


cdef inline double _ipow(double v, double e) noexcept nogil:
    # small integer exponents by multiplication; pow() dominates the cost otherwise
    if e == 2.0:
        return v * v
    if e == 1.0:
        return v
    if e == 3.0:
        return v * v * v
    if e == 4.0:
        v = v * v
        return v * v
    return pow(v, e)


cdef inline double _pnorm(const double* x, Py_ssize_t n, double p) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, a
    if isinf(p):
        for i in range(n):
            a = fabs(x[i])
            if a > acc:
                acc = a
        return acc
    if p == 1.0:
        for i in range(n):
            acc += fabs(x[i])
        return acc
    if p == 2.0:
        for i in range(n):
            acc += x[i] * x[i]
        return sqrt(acc)
    for i in range(n):
        acc += _ipow(fabs(x[i]), p)
    return pow(acc, 1.0 / p)


cdef inline double _gauge(int kind, const double* prm, const double* x, Py_ssize_t dim) noexcept nogil:
    cdef Py_ssize_t i, b, nblocks, start, size
    cdef double sq = 0.0, c = 0.0, nrm, outer, v, acc
    if kind == NORM_P:
        return _pnorm(x, dim, prm[0])
    if kind == BLOCK_P:
        outer = prm[0]
        nblocks = <Py_ssize_t>prm[1]
        start = 0
        acc = 0.0
        for b in range(nblocks):
            size = <Py_ssize_t>prm[2 + 2 * b]
            v = _pnorm(x + start, size, prm[3 + 2 * b])
            start += size
            if isinf(outer):
                if v > acc:
                    acc = v
            elif outer == 1.0:
                acc += v
            elif outer == 2.0:
                acc += v * v
            else:
                acc += _ipow(v, outer)
        if isinf(outer) or outer == 1.0:
            return acc
        if outer == 2.0:
            return sqrt(acc)
        return pow(acc, 1.0 / outer)
    for i in range(dim):
        sq += x[i] * x[i]
    if kind == TRUNCATED:
        nrm = sqrt(sq)
        return nrm if nrm < prm[0] else prm[0]
    if kind == FRAC_POWER:
        return pow(sqrt(sq), prm[0])
    if kind == NORM_PLUS_SQUARE:
        return sqrt(sq) + sq
    if kind == ASYM_SUM:
        for i in range(dim):
            c += x[i] * prm[i]
        nrm = sqrt(sq)
        if c >= 0.0:
            return nrm + c
        return nrm - 4.0 * c
    return NAN


cdef inline double _ratio(int kind, const double* prm, const double* x, const double* y,
                          double* work, Py_ssize_t dim, double sigma, double delta, double c) noexcept nogil:
    # c = 2^(sigma - 1)
    cdef Py_ssize_t i
    cdef double fx, fy, fs, fd, den
    fx = _gauge(kind, prm, x, dim)
    fy = _gauge(kind, prm, y, dim)
    den = _ipow(fx, sigma) + _ipow(fy, sigma)
    if not den > delta:
        return NAN
    for i in range(dim):
        work[i] = x[i] + y[i]
    fs = _gauge(kind, prm, work, dim)
    for i in range(dim):
        work[i] = x[i] - y[i]
    fd = _gauge(kind, prm, work, dim)
    return (_ipow(fs, sigma) + _ipow(fd, sigma)) / (c * den)


def _check_kind(int kind):
    if kind < 0 or kind > 5:
        raise ValueError(f"unknown kernel kind {kind}")


def gauge_batch(int kind, params, X):
    _check_kind(kind)
    cdef const double[::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0], dim = Xv.shape[1], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef const double* pp = &prm[0] if prm.shape[0] > 0 else NULL
    with nogil:
        for i in range(n):
            ov[i] = _gauge(kind, pp, &Xv[i, 0], dim)
    return out


def ratio_batch(int kind, params, X, Y, double sigma, delta):
    _check_kind(kind)
    cdef const double[::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] Yv = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0], dim = Xv.shape[1], i
    cdef const double[::1] dv = np.ascontiguousarray(np.broadcast_to(np.asarray(delta, dtype=np.float64), (n,)))
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double[::1] work = np.empty(max(dim, 1), dtype=np.float64)
    cdef const double* pp = &prm[0] if prm.shape[0] > 0 else NULL
    cdef double c = pow(2.0, sigma - 1.0)
    with nogil:
        for i in range(n):
            ov[i] = _ratio(kind, pp, &Xv[i, 0], &Yv[i, 0], &work[0], dim, sigma, dv[i], c)
    return out


def refine_pairs(int kind, params, X0, Y0, double sigma, delta, noise, step0, double decay):
    _check_kind(kind)
    cdef const double[::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    X = np.array(X0, dtype=np.float64, copy=True, order="C")
    Y = np.array(Y0, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] Xv = X
    cdef double[:, ::1] Yv = Y
    cdef Py_ssize_t K = Xv.shape[0], dim = Xv.shape[1], i, j, k
    cdef const double[:, :, ::1] nv = np.ascontiguousarray(noise, dtype=np.float64)
    cdef Py_ssize_t steps = nv.shape[1]
    cdef const double[::1] dv = np.ascontiguousarray(np.broadcast_to(np.asarray(delta, dtype=np.float64), (K,)))
    cdef const double[::1] sv = np.array(np.broadcast_to(np.asarray(step0, dtype=np.float64), (K,)), dtype=np.float64)
    vals = np.empty(K, dtype=np.float64)
    cdef double[::1] vv = vals
    cdef double[::1] xc = np.empty(max(dim, 1), dtype=np.float64)
    cdef double[::1] yc = np.empty(max(dim, 1), dtype=np.float64)
    cdef double[::1] work = np.empty(max(dim, 1), dtype=np.float64)
    cdef const double* pp = &prm[0] if prm.shape[0] > 0 else NULL
    cdef double val, rc, mag, a, s, step
    cdef double c = pow(2.0, sigma - 1.0)
    with nogil:
        for i in range(K):
            val = _ratio(kind, pp, &Xv[i, 0], &Yv[i, 0], &work[0], dim, sigma, dv[i], c)
            if val != val:
                val = -INFINITY
            step = sv[i]
            for k in range(steps):
                mag = 0.0
                for j in range(dim):
                    a = fabs(Xv[i, j])
                    if a > mag:
                        mag = a
                    a = fabs(Yv[i, j])
                    if a > mag:
                        mag = a
                if mag < 1e-300:
                    mag = 1e-300
                s = step * mag
                for j in range(dim):
                    xc[j] = Xv[i, j] + s * nv[i, k, j]
                    yc[j] = Yv[i, j] + s * nv[i, k, dim + j]
                rc = _ratio(kind, pp, &xc[0], &yc[0], &work[0], dim, sigma, dv[i], c)
                if rc > val:
                    val = rc
                    for j in range(dim):
                        Xv[i, j] = xc[j]
                        Yv[i, j] = yc[j]
                else:
                    step = step * decay
            vv[i] = val
    return X, Y, vals
