"""Metric abstraction, the gauge ``f(x) = d(x, 0)`` and the two ratio functionals.

A :class:`MetricSpace` is an evaluation contract: a distance function on a
vector space together with its zero element, a seeded sampler and a few hooks
(scalar multiplication, perturbation, probe points) that the audits and the
estimator need.  Real spaces carry points as 1-D ``numpy`` arrays; the exact
rational spaces in :mod:`njclab.qspace` subclass it with their own vector type.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

#: relative threshold below which a ratio denominator counts as zero
DEGENERATE_RTOL = 1e-12


class ContractViolation(ValueError):
    """A precondition of a public operation was violated."""


class DegeneratePair(ArithmeticError):
    """The ratio denominator vanished (numerically) for the given pair."""


@dataclass(frozen=True)
class Order:
    """The order ``sigma >= 1`` of the constant."""

    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not math.isfinite(s) or s < 1.0:
            raise ContractViolation(f"order sigma must be a finite real >= 1, got {self.sigma!r}")
        object.__setattr__(self, "sigma", s)

    def __float__(self):
        return self.sigma

    @property
    def universal_lower(self) -> float:
        """``2**(2 - sigma)``, the value of the ratio at any pair ``(x, 0)``."""
        return 2.0 ** (2.0 - self.sigma)


def as_order(sigma) -> Order:
    return sigma if isinstance(sigma, Order) else Order(sigma)


@dataclass(frozen=True)
class Kernel:
    """Descriptor of a built-in gauge that the batch kernels can evaluate."""

    kind: int
    params: tuple[float, ...] = ()

    def array(self) -> np.ndarray:
        return np.asarray(self.params, dtype=np.float64)


class MetricSpace:
    """A metric on ``R^dim`` (or on a subclass-defined vector type).

    Parameters
    ----------
    name
        Identifier used in reports.
    dim
        Number of coordinates.
    distance
        Pure function ``(x, y) -> float``.
    kind, params
        Registry key and parameters (used for closed-form lookup and reports).
    kernel
        Optional :class:`Kernel` enabling the compiled/vectorized batch path.
        Its gauge must agree with ``distance(x, 0)``.
    probes
        Fixed points tried before random samples in audits and the estimator.
    seed_pairs
        Extra pairs the estimator always evaluates.
    """

    array_based = True

    def __init__(
        self,
        name: str,
        dim: int,
        distance: Callable[[Any, Any], float],
        *,
        kind: str = "custom",
        params: dict | None = None,
        kernel: Kernel | None = None,
        probes: Sequence | None = None,
        seed_pairs: Sequence | None = None,
    ):
        if int(dim) < 1:
            raise ContractViolation(f"dimension must be >= 1, got {dim}")
        self.name = name
        self.dim = int(dim)
        self._distance = distance
        self.kind = kind
        self.params = dict(params or {})
        self.kernel = kernel
        self._probes = list(probes) if probes is not None else None
        self._seed_pairs = list(seed_pairs or [])

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, dim={self.dim})"

    # -- vectors ---------------------------------------------------------
    @property
    def zero(self):
        return np.zeros(self.dim)

    def validate(self, x):
        v = np.asarray(x, dtype=np.float64)
        if v.ndim == 0 and self.dim == 1:
            v = v.reshape(1)
        if v.shape != (self.dim,):
            raise ContractViolation(f"{self.name}: expected a vector of dimension {self.dim}, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ContractViolation(f"{self.name}: vector has non-finite coordinates")
        return v

    def scale(self, x, lam):
        """``lam * x``; ``None`` when the product is not representable."""
        return float(lam) * x

    def equal(self, x, y) -> bool:
        return bool(np.array_equal(x, y))

    def is_zero(self, x) -> bool:
        return not np.any(x)

    def magnitude(self, x) -> float:
        return float(np.max(np.abs(x))) if len(x) else 0.0

    def extra_scalars(self) -> list:
        """Scalars beyond the sampled reals that homogeneity audits must try."""
        return []

    def to_json(self, x):
        return [float(c) for c in x]

    # -- sampling --------------------------------------------------------
    def sample(self, rng: np.random.Generator, scale: float):
        return rng.standard_normal(self.dim) * scale

    def sample_batch(self, rng: np.random.Generator, scales: np.ndarray) -> np.ndarray:
        return rng.standard_normal((len(scales), self.dim)) * np.asarray(scales)[:, None]

    def perturb_pair(self, x, y, rel_step: float, rng: np.random.Generator):
        s = rel_step * max(self.magnitude(x), self.magnitude(y), 1e-300)
        return x + s * rng.standard_normal(self.dim), y + s * rng.standard_normal(self.dim)

    def probes(self) -> list:
        if self._probes is not None:
            return list(self._probes)
        eye = np.eye(self.dim)
        pts = []
        for i in range(self.dim):
            pts += [eye[i], 2.0 * eye[i], -eye[i]]
        if self.dim > 1:
            pts.append(np.ones(self.dim))
        return pts

    def seed_pairs(self) -> list:
        return list(self._seed_pairs)

    # -- evaluation ------------------------------------------------------
    def eval(self, x, y) -> float:
        if self.array_based:
            # internal callers pass validated arrays; convert user sequences
            if not isinstance(x, np.ndarray):
                x = self.validate(x)
            if not isinstance(y, np.ndarray):
                y = self.validate(y)
        return float(self._distance(x, y))

    def gauge(self, x) -> float:
        return self.eval(x, self.zero)

    def gauge_batch(self, X) -> np.ndarray:
        """Gauge of each row; uses the batch kernel when one is registered."""
        if self.kernel is not None:
            from njclab import kernels

            return kernels.gauge_batch(self.kernel, np.asarray(X, dtype=np.float64))
        return np.array([self.gauge(x) for x in X], dtype=np.float64)


class GaugeFunction:
    """``f(x) = d(x, 0)`` for a given space; never cached."""

    def __init__(self, source: MetricSpace):
        self.source = source

    def __call__(self, x) -> float:
        return self.source.eval(x, self.source.zero)

    value = __call__


def gauge(space: MetricSpace, x) -> float:
    """Return ``d(x, 0)``.  Raises :class:`ContractViolation` on a dimension mismatch."""
    return space.gauge(space.validate(x))


def degenerate_threshold(sigma, scale: float = 1.0) -> float:
    return DEGENERATE_RTOL * float(scale) ** as_order(sigma).sigma


def _ratio_from_gauges(fs, fd, fx, fy, s: float):
    return (fs**s + fd**s) / (2.0 ** (s - 1.0) * (fx**s + fy**s))


def gauge_ratio(space: MetricSpace, sigma, x, y, *, scale: float = 1.0) -> float:
    """``[f^s(x+y) + f^s(x-y)] / [2^(s-1) (f^s(x) + f^s(y))]``.

    ``scale`` is the magnitude the pair was drawn at; it sets the degeneracy
    threshold ``1e-12 * scale**sigma`` on the denominator.
    """
    s = as_order(sigma).sigma
    x, y = space.validate(x), space.validate(y)
    fx, fy = space.gauge(x), space.gauge(y)
    den = fx**s + fy**s
    if not den > degenerate_threshold(s, scale):
        raise DegeneratePair(f"denominator {den!r} below threshold at scale {scale}")
    fs, fd = space.gauge(x + y), space.gauge(x - y)
    return _ratio_from_gauges(fs, fd, fx, fy, s)


def param_ratio(space: MetricSpace, sigma, x, y, t: float) -> float:
    """``[f^s(x+ty) + f^s(x-ty)] / [2^(s-1) (1 + t^s)]`` for ``t`` in [0, 1]."""
    s = as_order(sigma).sigma
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ContractViolation(f"t must lie in [0, 1], got {t}")
    x, y = space.validate(x), space.validate(y)
    if space.is_zero(x) and space.is_zero(y):
        raise DegeneratePair("x and y are both zero")
    ty = space.scale(y, t)
    if ty is None:
        raise ContractViolation(f"{space.name}: cannot form t*y for t={t}")
    num = space.gauge(x + ty) ** s + space.gauge(x - ty) ** s
    return num / (2.0 ** (s - 1.0) * (1.0 + t**s))


@dataclass(frozen=True)
class Bracket:
    """Interval ``[lo, hi]`` every value of the constant must lie in."""

    lo: float
    hi: float = math.inf
    reasons: tuple[str, ...] = field(default=())

    def contains(self, value: float, *, lo_tol: float = 1e-9, hi_tol: float = 1e-6) -> bool:
        return self.lo - lo_tol <= value <= self.hi + hi_tol

    def to_json(self):
        return {"lo": self.lo, "hi": None if math.isinf(self.hi) else self.hi, "reasons": list(self.reasons)}


def theorem_bounds(props, sigma) -> Bracket:
    """Bracket implied by the audited properties of a gauge.

    ``props`` is a :class:`~njclab.properties.PropertyReport` (anything with a
    ``passed(name)`` method works).  The lower end is ``2^(2-s)``, raised to 1
    when 2-homogeneity passed; the upper end is 2 when both subadditivity and
    evenness passed and infinite otherwise.
    """
    order = as_order(sigma)
    lo = order.universal_lower
    reasons = ["universal lower bound 2^(2-sigma)"]
    if props.passed("two_homogeneous") and lo < 1.0:
        lo = 1.0
        reasons.append("2-homogeneous: G(x, x) = 1")
    hi = math.inf
    if props.passed("subadditive") and props.passed("even"):
        hi = 2.0
        reasons.append("subadditive and even: constant <= 2")
    return Bracket(lo, hi, tuple(reasons))


@dataclass
class RatioSample:
    """A pair ``(x, y)`` together with its ratio value."""

    x: Any
    y: Any
    value: float

    def recompute(self, space: MetricSpace, sigma) -> float:
        return gauge_ratio(space, sigma, self.x, self.y, scale=0.0)

    def to_json(self, space: MetricSpace):
        return {"x": space.to_json(self.x), "y": space.to_json(self.y), "value": self.value}
