"""Built-in floating-point metrics with their registered property profiles.

Each constructor returns a :class:`~njclab.core.MetricSpace` whose
``expected_properties`` attribute records the audit outcome the construction
is known to have; ``tests/test_zoo.py`` checks the audits agree.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from njclab import kernels
from njclab.core import ContractViolation, Kernel, MetricSpace

STANDARD_PROPERTIES = (
    "metric_axioms",
    "even",
    "subadditive",
    "midpoint_convex",
    "convex",
    "translation_invariant",
    "positively_homogeneous",
    "absolutely_homogeneous",
    "two_homogeneous",
)


def _profile(**fails) -> dict[str, bool]:
    prof = {name: True for name in STANDARD_PROPERTIES}
    for name, ok in fails.items():
        prof[name] = ok
    return prof


@dataclass(frozen=True)
class ZooEntry:
    kind: str
    dim: int
    expected_properties: dict = field(default_factory=dict)
    closed_forms: dict = field(default_factory=dict)


def _pnorm(v, p: float) -> float:
    a = np.abs(v)
    if math.isinf(p):
        return float(a.max()) if len(a) else 0.0
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return math.sqrt(float(np.dot(v, v)))
    return float((a**p).sum() ** (1.0 / p))


def _enorm(v) -> float:
    return math.sqrt(float(np.dot(v, v)))


def _register(space: MetricSpace, expected: dict, closed_forms: dict | None = None) -> MetricSpace:
    space.expected_properties = expected
    space.entry = ZooEntry(space.kind, space.dim, expected, dict(closed_forms or {}))
    return space


def make_norm_induced(dim: int, p: float) -> MetricSpace:
    """``d(x, y) = ||x - y||_p`` on ``R^dim``; ``p = inf`` is the max norm."""
    p = float(p)
    if not p >= 1.0:
        raise ContractViolation(f"norm exponent must satisfy p >= 1, got {p}")
    label = "inf" if math.isinf(p) else f"{p:g}"
    space = MetricSpace(
        f"norm({label})",
        dim,
        lambda x, y: _pnorm(x - y, p),
        kind="norm",
        params={"p": p},
        kernel=Kernel(kernels.NORM_P, (p,)),
    )
    forms = {"sigma=2": 1.0} if p == 2.0 else {}
    if dim >= 2:
        forms["p-metric"] = "pmetric_constant(p, sigma)"
    return _register(space, _profile(), forms)


def make_euclidean(dim: int) -> MetricSpace:
    return make_norm_induced(dim, 2.0)


def make_truncated(dim: int, radius: float = 1.0) -> MetricSpace:
    """``d(x, y) = min(||x - y||, radius)``."""
    radius = float(radius)
    if not radius > 0.0:
        raise ContractViolation(f"radius must be positive, got {radius}")
    space = MetricSpace(
        f"truncated({radius:g})",
        dim,
        lambda x, y: min(_enorm(x - y), radius),
        kind="truncated",
        params={"radius": radius},
        kernel=Kernel(kernels.TRUNCATED, (radius,)),
    )
    prof = _profile(
        midpoint_convex=False,
        convex=False,
        positively_homogeneous=False,
        absolutely_homogeneous=False,
        two_homogeneous=False,
    )
    forms = {"sigma in [1,2]": "2^(2-sigma)"} if radius == 1.0 else {}
    return _register(space, prof, forms)


def make_fractional_power(dim: int, exponent: float) -> MetricSpace:
    """``d(x, y) = ||x - y||^exponent`` for ``exponent`` in (0, 1]."""
    exponent = float(exponent)
    if not 0.0 < exponent <= 1.0:
        raise ContractViolation(f"exponent must lie in (0, 1], got {exponent}")
    if exponent == 1.0:
        return make_euclidean(dim)
    space = MetricSpace(
        f"frac-power({exponent:g})",
        dim,
        lambda x, y: _enorm(x - y) ** exponent,
        kind="frac-power",
        params={"exponent": exponent},
        kernel=Kernel(kernels.FRAC_POWER, (exponent,)),
    )
    prof = _profile(
        midpoint_convex=False,
        convex=False,
        positively_homogeneous=False,
        absolutely_homogeneous=False,
        two_homogeneous=False,
    )
    forms = {"sigma=4": 0.25} if math.isclose(exponent, 0.2, rel_tol=0, abs_tol=1e-15) else {}
    return _register(space, prof, forms)


def make_norm_plus_square(dim: int) -> MetricSpace:
    """``d(x, y) = ||x - y|| + | ||x||^2 - ||y||^2 |``; gauge ``||x|| + ||x||^2``."""

    def dist(x, y):
        return _enorm(x - y) + abs(float(np.dot(x, x)) - float(np.dot(y, y)))

    space = MetricSpace(
        "norm-plus-square",
        dim,
        dist,
        kind="norm-plus-square",
        kernel=Kernel(kernels.NORM_PLUS_SQUARE, ()),
    )
    prof = _profile(
        subadditive=False,
        translation_invariant=False,
        positively_homogeneous=False,
        absolutely_homogeneous=False,
        two_homogeneous=False,
    )
    return _register(space, prof)


def make_asymmetric_sum(dim: int, direction=None) -> MetricSpace:
    """Sum-type metric ``d(x, y) = h(x) + h(y)`` for ``x != y``.

    ``h(x) = ||x|| + <x, e>`` when ``<x, e> >= 0`` and ``||x|| - 4 <x, e>``
    otherwise, for a unit direction ``e`` (default: first basis vector).
    """
    e = np.zeros(dim) if direction is None else np.asarray(direction, dtype=np.float64)
    if direction is None:
        e[0] = 1.0
    if e.shape != (dim,):
        raise ContractViolation(f"direction must have dimension {dim}")
    if abs(_enorm(e) - 1.0) > 1e-12:
        raise ContractViolation("direction must be a unit vector")
    e = e.copy()

    def h(v):
        c = float(np.dot(v, e))
        n = _enorm(v)
        return n + c if c >= 0.0 else n - 4.0 * c

    def dist(x, y):
        if np.array_equal(x, y):
            return 0.0
        return h(x) + h(y)

    space = MetricSpace(
        "asym-sum",
        dim,
        dist,
        kind="asym-sum",
        params={"direction": e.tolist()},
        kernel=Kernel(kernels.ASYM_SUM, tuple(e.tolist())),
    )
    space.direction = e
    prof = _profile(
        even=False,
        translation_invariant=False,
        absolutely_homogeneous=False,
    )
    return _register(space, prof)


def asym_sum_witnesses(space: MetricSpace):
    """``k -> (e, k e)``: the pairs whose ratio tends to ``(2^s + 5^s) / 2^(2s-1)``."""
    e = space.direction

    def gen(k):
        return e.copy(), float(k) * e

    return gen


_SPEC = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")

ZOO_NAMES = ("euclidean", "norm", "truncated", "frac-power", "norm-plus-square", "asym-sum")


def parse_number(text: str) -> float:
    text = text.strip()
    if text in ("inf", "infinity", "∞"):
        return math.inf
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


def make_space(spec: str, dim: int = 2) -> MetricSpace:
    """Build a zoo space from a name such as ``"norm(2)"`` or ``"frac-power(1/5)"``."""
    m = _SPEC.match(spec)
    if not m:
        raise ContractViolation(f"cannot parse metric spec {spec!r}")
    name, arg = m.group(1), m.group(2)
    if name == "euclidean":
        return make_euclidean(dim)
    if name == "norm":
        return make_norm_induced(dim, parse_number(arg) if arg else 2.0)
    if name == "truncated":
        return make_truncated(dim, parse_number(arg) if arg else 1.0)
    if name in ("frac-power", "fractional-power"):
        return make_fractional_power(dim, parse_number(arg) if arg else 0.2)
    if name == "norm-plus-square":
        return make_norm_plus_square(dim)
    if name == "asym-sum":
        return make_asymmetric_sum(dim)
    raise ContractViolation(f"unknown metric {name!r}; known: {', '.join(ZOO_NAMES)}")


def default_zoo(dim: int = 2) -> list[MetricSpace]:
    return [
        make_euclidean(dim),
        make_norm_induced(dim, 1.0),
        make_norm_induced(dim, math.inf),
        make_norm_induced(dim, 3.0),
        make_truncated(dim, 1.0),
        make_fractional_power(dim, 0.2),
        make_norm_plus_square(dim),
        make_asymmetric_sum(dim),
    ]
