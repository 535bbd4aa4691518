"""Simplex functions, product metrics and the constants they inherit.

A simplex function ``psi`` on ``Omega_n = {t >= 0, sum t = 1}`` that is
convex, equals 1 at the vertices and satisfies the face inequality

    psi(t) >= (1 - t_i) * psi(t with t_i removed, renormalized)   (t_i < 1)

turns metrics ``d_1..d_n`` into the product metric
``d_psi(x, y) = S * psi(d_1/S, ..., d_n/S)`` with ``S = sum d_i``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from njclab import kernels
from njclab.core import Bracket, ContractViolation, Kernel, MetricSpace, as_order
from njclab.estimator import pmetric_constant
from njclab.properties import (
    DEFAULT_SAMPLES,
    CheckResult,
    Status,
    check_clarkson,
)

MEMBERSHIP_TOL = 1e-12


class PsiKind(str, enum.Enum):
    PSI_P = "PSI_P"
    CUSTOM = "CUSTOM"


@dataclass
class Membership:
    status: Status
    checks: dict[str, CheckResult]
    grid_resolution: int

    def to_json(self) -> dict:
        return {
            "schema": "njc-lab/1",
            "status": self.status.value,
            "grid_resolution": self.grid_resolution,
            "checks": {k: v.to_json() for k, v in self.checks.items()},
        }


@dataclass
class SimplexFunction:
    n: int
    fn: Callable[[np.ndarray], float]
    kind: PsiKind = PsiKind.CUSTOM
    p: float | None = None
    name: str = "custom"
    membership: Membership | None = None
    vectorized: bool = False  # fn reduces over the last axis, so it accepts a matrix of points

    def __call__(self, t) -> float:
        return float(self.fn(np.asarray(t, dtype=np.float64)))

    def eval_batch(self, T: np.ndarray) -> np.ndarray:
        T = np.asarray(T, dtype=np.float64)
        if self.vectorized:
            return np.asarray(self.fn(T), dtype=np.float64)
        return np.array([self(t) for t in T], dtype=np.float64)


def _psi_p_fn(p: float):
    if math.isinf(p):
        return lambda t: np.max(t, axis=-1)
    if p == 1.0:
        return lambda t: np.sum(t, axis=-1)
    return lambda t: np.sum(t**p, axis=-1) ** (1.0 / p)


def make_psi_p(n: int, p) -> SimplexFunction:
    """``psi_p(t) = (sum t_i^p)^(1/p)``, the max for ``p = inf``."""
    p = float(p)
    if not p >= 1.0:
        raise ContractViolation(f"p must lie in [1, inf], got {p}")
    if n < 2:
        raise ContractViolation(f"n must be >= 2, got {n}")
    label = "inf" if math.isinf(p) else f"{p:g}"
    psi = SimplexFunction(n, _psi_p_fn(p), PsiKind.PSI_P, p, f"psi_{label}", vectorized=True)
    psi.membership = audit_membership(psi, 64 if n == 2 else 16)
    return psi


def _custom_registry():
    def avg(p1, p2):
        f1, f2 = _psi_p_fn(p1), _psi_p_fn(p2)
        return lambda t: 0.5 * (f1(t) + f2(t))

    return {
        "avg-1-inf": avg(1.0, math.inf),
        "avg-2-inf": avg(2.0, math.inf),
        "one": lambda t: np.ones(np.shape(t)[:-1]),
    }


CUSTOM_PSI = tuple(_custom_registry())


def make_custom_psi(name: str, n: int) -> SimplexFunction:
    reg = _custom_registry()
    if name not in reg:
        raise ContractViolation(f"unknown custom psi {name!r}; known: {', '.join(reg)}")
    psi = SimplexFunction(n, reg[name], PsiKind.CUSTOM, None, name, vectorized=True)
    psi.membership = audit_membership(psi, 64 if n == 2 else 16)
    return psi


def simplex_grid(n: int, res: int) -> np.ndarray:
    """Barycentric lattice ``{k / res : k >= 0, sum k = res}``."""
    if n == 2:
        k = np.arange(res + 1)
        return np.stack([k, res - k], axis=1) / res
    pts = [c for c in itertools.product(range(res + 1), repeat=n - 1) if sum(c) <= res]
    arr = np.array([list(c) + [res - sum(c)] for c in pts], dtype=np.float64)
    return arr / res


class _Acc:
    def __init__(self):
        self.margin = math.inf
        self.witness = None
        self.count = 0

    def add(self, lhs, rhs, point, relation):
        # lhs <= rhs
        m = rhs - lhs
        self.count += 1
        self.margin = min(self.margin, m)
        if m < -MEMBERSHIP_TOL and self.witness is None:
            self.witness = {"relation": relation, "points": {k: np.asarray(v) for k, v in point.items()},
                            "scalars": {}, "lhs": float(lhs), "rhs": float(rhs), "kind": "le", "margin": m}

    def result(self):
        st = Status.FAIL if self.witness is not None else Status.PASS
        return CheckResult(st, self.margin, self.witness, self.count)


def audit_membership(psi: SimplexFunction, grid_resolution: int = 64, seed: int = 0) -> Membership:
    """Grid audit of the vertex values, midpoint convexity, the face inequality and ``max t <= psi <= 1``."""
    if grid_resolution < 2:
        raise ContractViolation("grid_resolution must be >= 2")
    n = psi.n
    G = simplex_grid(n, grid_resolution)
    vals = psi.eval_batch(G)
    checks = {}

    vert = _Acc()
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        v = psi(e)
        vert.add(abs(v - 1.0), 0.0, {"t": e}, "vertex")
    checks["vertex"] = vert.result()

    conv = _Acc()
    if n == 2:
        idx = [(i, j) for i in range(len(G)) for j in range(i + 1, len(G))]
    else:
        rng = np.random.default_rng(seed)
        idx = [tuple(rng.integers(0, len(G), 2)) for _ in range(20000)]
    for i, j in idx:
        mid = 0.5 * (G[i] + G[j])
        conv.add(psi(mid), 0.5 * (vals[i] + vals[j]), {"s": G[i], "t": G[j]}, "midpoint_convexity")
    checks["convexity"] = conv.result()

    face = _Acc()
    for t, v in zip(G, vals):
        for i in range(n):
            if t[i] < 1.0:
                u = t / (1.0 - t[i])
                u[i] = 0.0
                face.add((1.0 - t[i]) * psi(u), v, {"t": t}, f"face_inequality_{i}")
    checks["inequality_I"] = face.result()

    env = _Acc()
    for t, v in zip(G, vals):
        env.add(float(np.max(t)), v, {"t": t}, "envelope_lower")
        env.add(v, 1.0, {"t": t}, "envelope_upper")
    checks["envelope"] = env.result()

    status = Status.FAIL if any(c.status is Status.FAIL for c in checks.values()) else Status.PASS
    return Membership(status, checks, grid_resolution)


# --------------------------------------------------------------------------
# product metric
# --------------------------------------------------------------------------

class ProductSpace(MetricSpace):
    """``d_psi`` on the concatenation of the component coordinates."""

    def __init__(self, components: Sequence[MetricSpace], psi: SimplexFunction):
        self.components = list(components)
        self.psi = psi
        sizes = [c.dim for c in self.components]
        self.slices = []
        start = 0
        for s in sizes:
            self.slices.append(slice(start, start + s))
            start += s
        kernel = None
        if psi.kind is PsiKind.PSI_P and all(
            c.kernel is not None and c.kernel.kind == kernels.NORM_P for c in self.components
        ):
            prm = [psi.p, float(len(sizes))]
            for c in self.components:
                prm += [float(c.dim), float(c.kernel.params[0])]
            kernel = Kernel(kernels.BLOCK_P, tuple(prm))
        names = ",".join(c.name for c in self.components)
        # factors known to satisfy every (p, q)-Clarkson inequality: absolute values and Euclidean norms
        clarkson = all(c.kind == "norm" and (c.dim == 1 or c.params.get("p") == 2.0) for c in self.components)
        super().__init__(
            f"product[{psi.name}]({names})",
            start,
            self._distance_fn,
            kind="pmetric" if psi.kind is PsiKind.PSI_P and clarkson else "product",
            params={"p": psi.p, "psi": psi.name} if psi.kind is PsiKind.PSI_P else {"psi": psi.name},
            kernel=kernel,
        )
        self._seed_pairs = self._unit_pairs()

    def split(self, x):
        return [x[s] for s in self.slices]

    def component_distances(self, x, y) -> np.ndarray:
        return np.array([c.eval(x[s], y[s]) for c, s in zip(self.components, self.slices)])

    def _distance_fn(self, x, y) -> float:
        d = self.component_distances(x, y)
        if self.psi.kind is PsiKind.PSI_P:
            p = self.psi.p
            if math.isinf(p):
                return float(d.max())
            if p == 1.0:
                return float(d.sum())
            return float((d**p).sum() ** (1.0 / p))
        if np.array_equal(x, y):
            return 0.0
        total = float(d.sum())
        if total == 0.0:
            return 0.0
        return total * self.psi(d / total)

    def gauge_batch(self, X) -> np.ndarray:
        if self.kernel is not None:
            return super().gauge_batch(X)
        X = np.asarray(X, dtype=np.float64)
        D = np.stack([c.gauge_batch(X[:, sl]) for c, sl in zip(self.components, self.slices)], axis=1)
        if self.psi.kind is PsiKind.PSI_P:
            return np.asarray(_psi_p_fn(self.psi.p)(D), dtype=np.float64)
        S = D.sum(axis=1)
        out = np.zeros(len(X))
        ok = S > 0
        out[ok] = S[ok] * self.psi.eval_batch(D[ok] / S[ok][:, None])
        return out

    def unit_in(self, i: int, scale: float = 1.0) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.slices[i].start] = scale
        return v

    def _unit_pairs(self):
        out = []
        for i in range(len(self.components)):
            for j in range(len(self.components)):
                if i != j:
                    x, y = self.unit_in(i), self.unit_in(j)
                    out += [(x, y), (x + y, x - y)]
        return out


def make_product(components: Sequence[MetricSpace], psi: SimplexFunction) -> ProductSpace:
    """Product metric ``d_psi``; ``psi`` must have passed its membership audit."""
    if psi.n != len(components):
        raise ContractViolation(f"psi is defined on Omega_{psi.n} but {len(components)} components were given")
    if psi.membership is None:
        psi.membership = audit_membership(psi)
    if psi.membership.status is not Status.PASS:
        raise ContractViolation(f"{psi.name} failed its membership audit")
    if any(not c.array_based for c in components):
        raise ContractViolation("product components must have real coordinates")
    return ProductSpace(components, psi)


def embed_component(space: ProductSpace, i: int) -> MetricSpace:
    """The metric ``d_psi`` restricted to the ``i``-th factor (other factors at zero)."""
    comp = space.components[i]
    sl = space.slices[i]

    def lift(v):
        out = np.zeros(space.dim)
        out[sl] = v
        return out

    return MetricSpace(f"{space.name}|{i}", comp.dim, lambda x, y: space.eval(lift(x), lift(y)))


# --------------------------------------------------------------------------
# transfer calculus
# --------------------------------------------------------------------------

@dataclass
class MinMax:
    m: float
    M: float
    argmin: np.ndarray
    argmax: np.ndarray

    def __iter__(self):
        return iter((self.m, self.M))


def _project(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, None)
    s = t.sum()
    return t / s if s > 0 else np.full_like(t, 1.0 / len(t))


def min_max_ratio(psi: SimplexFunction, phi: SimplexFunction, grid_resolution: int | None = None,
                  refine_steps: int = 200, seed: int = 0, random_points: int = 1000) -> MinMax:
    """Min and max of ``psi / phi`` over the simplex with their witness points."""
    if psi.n != phi.n:
        raise ContractViolation("psi and phi must live on the same simplex")
    for f in (psi, phi):
        if f.membership is not None and f.membership.status is not Status.PASS:
            raise ContractViolation(f"{f.name} failed its membership audit")
    n = psi.n
    res = grid_resolution or (200 if n == 2 else 64 if n == 3 else 16)
    rng = np.random.default_rng(seed)
    T = np.vstack([simplex_grid(n, res), rng.dirichlet(np.ones(n), random_points)])

    def ratio(t):
        return psi(t) / phi(t)

    R = np.array([ratio(t) for t in T])
    i_min, i_max = int(np.argmin(R)), int(np.argmax(R))
    best = {"min": (R[i_min], T[i_min]), "max": (R[i_max], T[i_max])}
    for key, sign in (("min", -1.0), ("max", 1.0)):
        v, t = best[key]
        step = 1.0 / res
        for _ in range(refine_steps):
            tc = _project(t + step * rng.standard_normal(n))
            vc = ratio(tc)
            if sign * vc > sign * v:
                v, t = vc, tc
            else:
                step *= 0.95
        best[key] = (v, t)
    return MinMax(float(best["min"][0]), float(best["max"][0]), best["min"][1], best["max"][1])


def transfer_bounds(C_phi: float, m: float, M: float, sigma) -> Bracket:
    """``[(m/M)^s C_phi, (M/m)^s C_phi]``."""
    s = as_order(sigma).sigma
    if not C_phi > 0 or not 0 < m <= M:
        raise ContractViolation("need C_phi > 0 and 0 < m <= M")
    r = (m / M) ** s
    return Bracket(r * C_phi, C_phi / r, ("transfer from a reference simplex function",))


class Side(str, enum.Enum):
    ABOVE = "ABOVE"
    BELOW = "BELOW"


def dominating_exact_constant(m2_or_M2: float, sigma, side: Side | str) -> float:
    """``M_2^s 2^(1-s/2)`` when ``psi >= phi`` (ABOVE), ``m_2^(-s) 2^(1-s/2)`` when ``psi <= phi`` (BELOW).

    The hypotheses (two factors, reference constant ``2^(1-s/2)``, positively
    homogeneous factors, one of them even) are the caller's to attest.
    """
    s = as_order(sigma).sigma
    side = Side(side)
    base = 2.0 ** (1.0 - s / 2.0)
    v = float(m2_or_M2)
    if not v > 0:
        raise ContractViolation("the extremal ratio must be positive")
    return v**s * base if side is Side.ABOVE else v ** (-s) * base


def check_clarkson_lift(components: Sequence[MetricSpace], p, samples: int = DEFAULT_SAMPLES,
                        seed: int = 0) -> CheckResult:
    """If every factor satisfies the ``(p, q)``-Clarkson inequality, so does the ``psi_p`` product.

    SKIPPED when some factor fails (the direct product check is attached in
    ``extra["direct"]``); otherwise the product's own check result.
    """
    p = float(p)
    if not 1.0 < p <= 2.0:
        raise ContractViolation(f"p must lie in (1, 2], got {p}")
    q = p / (p - 1.0)
    comp = [check_clarkson(c, p, q, samples, seed) for c in components]
    prod = make_product(components, make_psi_p(len(components), p))
    direct = check_clarkson(prod, p, q, samples, seed)
    statuses = [c.status.value for c in comp]
    if any(c.status is not Status.PASS for c in comp):
        return CheckResult(Status.SKIPPED, note="a factor fails the Clarkson inequality",
                           extra={"components": statuses, "direct": direct})
    direct.extra["components"] = statuses
    return direct


__all__ = [
    "PsiKind", "Membership", "SimplexFunction", "make_psi_p", "make_custom_psi", "CUSTOM_PSI",
    "simplex_grid", "audit_membership", "ProductSpace", "make_product", "embed_component",
    "MinMax", "min_max_ratio", "transfer_bounds", "Side", "dominating_exact_constant",
    "pmetric_constant", "check_clarkson_lift",
]
