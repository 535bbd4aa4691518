"""Exact rational vector spaces over a finite declared basis.

A :class:`BasisDecl` names finitely many basis elements, gives each one a
real embedding and a rational value of an additive functional.  Vectors are
:class:`QVector` maps from labels to :class:`fractions.Fraction`.  The basis
elements are assumed linearly independent over the rationals; that is the
declaration's responsibility, and a dependent declaration voids the
non-normability results computed on top of it.

Real scalars that are not rational cannot act on a ``QVector`` in general.
A declaration may supply the action of ``sqrt(2)`` on its labels, which lets
numbers ``a + b*sqrt(2)`` (:class:`QuadraticScalar`) act exactly; this is how
the homogeneity audits reach irrational scalars.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from njclab.core import ContractViolation, MetricSpace

SQRT2 = math.sqrt(2.0)


def to_fraction(v) -> Fraction:
    """Parse ``"p/q"``, decimal strings, ints, floats (exactly) or Fractions."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ContractViolation(f"non-finite scalar {v!r}")
        return Fraction(float(v))
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ContractViolation(f"cannot parse rational {v!r}") from exc
    raise ContractViolation(f"not a rational: {v!r}")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


class QVector:
    """Immutable finite map ``label -> Fraction`` with no stored zeros."""

    __slots__ = ("_items",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[str, Fraction] = {}
        for label, q in items:
            q = to_fraction(q)
            if q:
                acc[label] = acc.get(label, Fraction(0)) + q
        self._items = tuple(sorted((k, v) for k, v in acc.items() if v))

    @classmethod
    def _raw(cls, items: dict) -> "QVector":
        v = cls.__new__(cls)
        v._items = tuple(sorted((k, q) for k, q in items.items() if q))
        return v

    @property
    def coeffs(self) -> dict[str, Fraction]:
        return dict(self._items)

    def labels(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self._items)

    def __getitem__(self, label) -> Fraction:
        return self.coeffs.get(label, Fraction(0))

    def __iter__(self):
        return iter(self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        return isinstance(other, QVector) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        body = ", ".join(f"{k}: {format_fraction(q)}" for k, q in self._items)
        return f"QVector({{{body}}})"

    def __add__(self, other: "QVector") -> "QVector":
        if not isinstance(other, QVector):
            return NotImplemented
        acc = dict(self._items)
        for k, q in other._items:
            acc[k] = acc.get(k, 0) + q
        return QVector._raw(acc)

    def __neg__(self) -> "QVector":
        return QVector._raw({k: -q for k, q in self._items})

    def __sub__(self, other: "QVector") -> "QVector":
        if not isinstance(other, QVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, q) -> "QVector":
        if isinstance(q, QVector):
            return NotImplemented
        q = to_fraction(q)
        return QVector._raw({k: q * c for k, c in self._items})

    __rmul__ = __mul__


@dataclass(frozen=True)
class QuadraticScalar:
    """The real number ``a + b*sqrt(2)`` with rational ``a, b``."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", to_fraction(self.a))
        object.__setattr__(self, "b", to_fraction(self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT2

    def __neg__(self):
        return QuadraticScalar(-self.a, -self.b)

    def __rsub__(self, other):
        o = to_fraction(other)
        return QuadraticScalar(o - self.a, -self.b)

    def __abs__(self):
        return self if float(self) >= 0 else -self

    def __repr__(self):
        return f"{format_fraction(self.a)} + {format_fraction(self.b)}*sqrt(2)"


@dataclass(frozen=True)
class BasisDecl:
    """Finite basis fragment with real embedding and additive-functional values.

    ``embed`` maps each label to a real number or a real vector (all of one
    length).  ``sqrt2_image`` optionally maps each label ``b`` to the vector
    ``sqrt(2) * b`` expressed in the basis.
    """

    labels: tuple[str, ...]
    embed: Mapping[str, object]
    functional_values: Mapping[str, Fraction]
    sqrt2_image: Mapping[str, QVector] | None = None
    name: str = "basis"
    _embed_arr: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels) or not labels:
            raise ContractViolation("basis labels must be distinct and nonempty")
        object.__setattr__(self, "labels", labels)
        arr = {}
        for lb in labels:
            if lb not in self.embed:
                raise ContractViolation(f"label {lb!r} has no embedding")
            arr[lb] = np.atleast_1d(np.asarray(self.embed[lb], dtype=np.float64))
        if len({a.shape for a in arr.values()}) != 1:
            raise ContractViolation("all embeddings must have the same dimension")
        object.__setattr__(self, "_embed_arr", arr)
        fv = {lb: to_fraction(self.functional_values.get(lb, 0)) for lb in labels}
        object.__setattr__(self, "functional_values", fv)
        if self.sqrt2_image is not None:
            img = {lb: QVector(v) if not isinstance(v, QVector) else v for lb, v in self.sqrt2_image.items()}
            if set(img) != set(labels):
                raise ContractViolation("sqrt2_image must cover every label")
            object.__setattr__(self, "sqrt2_image", img)

    @property
    def embed_dim(self) -> int:
        return next(iter(self._embed_arr.values())).shape[0]

    def check(self, x: QVector) -> QVector:
        if not isinstance(x, QVector):
            raise ContractViolation(f"expected a QVector, got {type(x).__name__}")
        for lb in x.labels():
            if lb not in self._embed_arr:
                raise ContractViolation(f"label {lb!r} not declared in {self.name}")
        return x

    def unit(self, label: str) -> QVector:
        if label not in self._embed_arr:
            raise ContractViolation(f"label {label!r} not declared in {self.name}")
        return QVector({label: 1})

    def embed_vector(self, x: QVector) -> np.ndarray:
        out = np.zeros(self.embed_dim)
        for lb, q in self.check(x):
            out += float(q) * self._embed_arr[lb]
        return out

    def times_sqrt2(self, x: QVector) -> QVector | None:
        if self.sqrt2_image is None:
            return None
        acc = QVector()
        for lb, q in x:
            acc = acc + self.sqrt2_image[lb] * q
        return acc

    def to_json(self) -> list[dict]:
        return [
            {
                "label": lb,
                "embed": repr(float(self._embed_arr[lb][0])) if self.embed_dim == 1 else [float(c) for c in self._embed_arr[lb]],
                "functional_value": format_fraction(self.functional_values[lb]),
            }
            for lb in self.labels
        ]


def hamel_basis() -> BasisDecl:
    """``{e -> 1, sqrt2e -> sqrt(2)}`` with ``g(e) = 1`` and ``g(sqrt2e) = 0``."""
    return BasisDecl(
        ("e", "sqrt2e"),
        {"e": 1.0, "sqrt2e": SQRT2},
        {"e": Fraction(1), "sqrt2e": Fraction(0)},
        sqrt2_image={"e": QVector({"sqrt2e": 1}), "sqrt2e": QVector({"e": 2})},
        name="hamel-e-sqrt2",
    )


def three_label_basis() -> BasisDecl:
    """``{e -> 1, sqrt2e -> sqrt(2), sqrt3e -> sqrt(3)}``, functional 1 on ``e`` only."""
    return BasisDecl(
        ("e", "sqrt2e", "sqrt3e"),
        {"e": 1.0, "sqrt2e": SQRT2, "sqrt3e": math.sqrt(3.0)},
        {"e": 1, "sqrt2e": 0, "sqrt3e": 0},
        name="e-sqrt2-sqrt3",
    )


def load_basis(source) -> BasisDecl:
    """Build a declaration from a JSON path, JSON text or a parsed list.

    Each entry is ``{"label": str, "embed": decimal string or list,
    "functional_value": "p/q"}``; an optional ``"sqrt2_image"`` object maps
    labels to ``{label: "p/q"}`` dictionaries.
    """
    data = source
    if isinstance(source, (str, Path)):
        p = Path(source)
        if p.suffix == ".json" and not p.exists():
            raise ContractViolation(f"basis file not found: {source}")
        text = p.read_text() if p.exists() else str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ContractViolation(f"basis file is not valid JSON: {exc}") from exc
    name = "basis"
    sqrt2 = None
    if isinstance(data, dict):
        name = data.get("name", name)
        sqrt2 = data.get("sqrt2_image")
        data = data.get("basis")
    if not isinstance(data, list) or not data:
        raise ContractViolation("basis declaration must be a nonempty list of entries")
    labels, embed, fv = [], {}, {}
    for i, entry in enumerate(data):
        try:
            lb = str(entry["label"])
            raw = entry["embed"]
        except (KeyError, TypeError) as exc:
            raise ContractViolation(f"basis entry {i}: needs 'label' and 'embed'") from exc
        try:
            embed[lb] = [float(c) for c in raw] if isinstance(raw, list) else float(raw)
        except ValueError as exc:
            raise ContractViolation(f"basis entry {i}: bad embed {raw!r}") from exc
        fv[lb] = to_fraction(str(entry.get("functional_value", "0")))
        labels.append(lb)
    image = None
    if sqrt2 is not None:
        image = {lb: QVector({k: to_fraction(str(v)) for k, v in m.items()}) for lb, m in sqrt2.items()}
    return BasisDecl(tuple(labels), embed, fv, image, name=name)


def additive_functional(basis: BasisDecl, x: QVector) -> Fraction:
    """``phi(x) = sum_b x[b] * g(b)``, exact."""
    basis.check(x)
    return sum((q * basis.functional_values[lb] for lb, q in x), Fraction(0))


class QSpace(MetricSpace):
    """Metric space whose points are :class:`QVector` over a declared basis."""

    array_based = False

    def __init__(self, name, basis: BasisDecl, distance, *, kind="custom", params=None):
        self.basis = basis
        super().__init__(name, len(basis.labels), distance, kind=kind, params=params)

    @property
    def zero(self):
        return QVector()

    def validate(self, x):
        return self.basis.check(x)

    def scale(self, x, lam):
        if isinstance(lam, QuadraticScalar):
            img = self.basis.times_sqrt2(x)
            if img is None:
                return None
            return x * lam.a + img * lam.b
        try:
            return x * to_fraction(lam)
        except ContractViolation:
            return None

    def equal(self, x, y) -> bool:
        return x == y

    def is_zero(self, x) -> bool:
        return not x

    def magnitude(self, x) -> float:
        return max((abs(float(q)) for _, q in x), default=0.0)

    def extra_scalars(self) -> list:
        if self.basis.sqrt2_image is None:
            return []
        return [QuadraticScalar(0, 1), QuadraticScalar(0, Fraction(1, 2))]

    def to_json(self, x):
        return {lb: format_fraction(q) for lb, q in x}

    def _random_rational(self, rng, scale) -> Fraction:
        num = int(rng.integers(-1000, 1001))
        den = int(rng.integers(1, 101))
        return Fraction(num, den) * Fraction(str(scale)) / 10

    def sample(self, rng, scale):
        return QVector({lb: self._random_rational(rng, scale) for lb in self.basis.labels})

    def sample_batch(self, rng, scales):
        return [self.sample(rng, s) for s in scales]

    def perturb_pair(self, x, y, rel_step, rng):
        mag = max(self.magnitude(x), self.magnitude(y), 1e-12)
        s = Fraction(rel_step * mag).limit_denominator(10**9)

        def step():
            return QVector({lb: s * Fraction(int(rng.integers(-1000, 1001)), 1000) for lb in self.basis.labels})

        return x + step(), y + step()

    def probes(self):
        units = [self.basis.unit(lb) for lb in self.basis.labels]
        pts = []
        for u in units:
            pts += [u, u * 2, -u]
        if len(units) > 1:
            total = QVector()
            for u in units:
                total = total + u
            pts.append(total)
        return pts

    def gauge_batch(self, X):
        return np.array([self.gauge(x) for x in X], dtype=np.float64)


def make_hamel_additive_metric(basis: BasisDecl | None = None) -> QSpace:
    """``d(x, y) = |embed(x - y)| + |phi(x - y)|``.

    The gauge is subadditive, even and homogeneous for nonnegative rationals,
    but not for irrational scalars, so it is not a norm.
    """
    basis = hamel_basis() if basis is None else basis

    def dist(x, y):
        v = x - y
        return float(np.linalg.norm(basis.embed_vector(v))) + abs(float(additive_functional(basis, v)))

    space = QSpace("hamel-additive", basis, dist, kind="hamel")
    space.expected_properties = {
        "metric_axioms": True,
        "even": True,
        "subadditive": True,
        "midpoint_convex": True,
        "convex": basis.sqrt2_image is None,
        "translation_invariant": True,
        "positively_homogeneous": basis.sqrt2_image is None,
        "absolutely_homogeneous": basis.sqrt2_image is None,
        "two_homogeneous": True,
    }
    return space


def squared_gauge_exact(x: QVector) -> Fraction:
    return sum((q * q for _, q in x), Fraction(0))


def make_rational_euclidean_metric(basis: BasisDecl | None = None) -> QSpace:
    """``d(x, y) = sqrt(sum of squared coefficients of x - y)``; square root at output only."""
    basis = three_label_basis() if basis is None else basis

    def dist(x, y):
        return math.sqrt(squared_gauge_exact(basis.check(x - y)))

    space = QSpace("rational-euclidean", basis, dist, kind="rational-euclidean")
    space.expected_properties = {
        "metric_axioms": True,
        "even": True,
        "subadditive": True,
        "midpoint_convex": True,
        "convex": basis.sqrt2_image is None,
        "translation_invariant": True,
        "positively_homogeneous": basis.sqrt2_image is None,
        "absolutely_homogeneous": basis.sqrt2_image is None,
        "two_homogeneous": True,
    }
    return space


def rational_parallelogram_exact(basis: BasisDecl, x: QVector, y: QVector) -> bool:
    """``A^2(x+y) + A^2(x-y) == 2 (A^2(x) + A^2(y))`` in exact arithmetic."""
    basis.check(x)
    basis.check(y)
    lhs = squared_gauge_exact(x + y) + squared_gauge_exact(x - y)
    rhs = 2 * (squared_gauge_exact(x) + squared_gauge_exact(y))
    return lhs == rhs


def check_rational_homogeneity(space: QSpace, samples: int = 1000, seed: int = 0, tol: float = 1e-12):
    """``f(q x) = q f(x)`` for nonnegative rationals ``q``.

    For the Hamel-additive metric the functional part is compared exactly and
    the embedded-norm part to ``tol`` relative; for other spaces the whole
    gauge is compared to ``tol``.
    """
    from njclab.properties import CheckResult, Status

    rng = np.random.default_rng(seed)
    basis = space.basis
    worst = math.inf
    for i in range(samples):
        x = space.sample(rng, (0.01, 1.0, 100.0)[i % 3])
        q = Fraction(int(rng.integers(0, 1001)), int(rng.integers(1, 101)))
        qx = x * q
        if space.kind == "hamel":
            if additive_functional(basis, qx) != q * additive_functional(basis, x):
                w = {"relation": "rational_homogeneity", "points": {"x": x}, "scalars": {"q": q},
                     "lhs": float(additive_functional(basis, qx)), "rhs": float(q * additive_functional(basis, x)),
                     "kind": "eq"}
                return CheckResult(Status.FAIL, -1.0, w, i + 1, note="functional part not exact")
            a = float(np.linalg.norm(basis.embed_vector(qx)))
            b = float(q) * float(np.linalg.norm(basis.embed_vector(x)))
        else:
            a, b = space.gauge(qx), float(q) * space.gauge(x)
        m = -abs(a - b) / max(abs(a), abs(b), 1.0)
        worst = min(worst, m)
        if m < -tol:
            w = {"relation": "rational_homogeneity", "points": {"x": x}, "scalars": {"q": q},
                 "lhs": a, "rhs": b, "kind": "eq"}
            return CheckResult(Status.FAIL, m, w, i + 1)
    return CheckResult(Status.PASS, worst, None, samples, note="functional part exact")


# --------------------------------------------------------------------------
# witness sequence for the Hamel-additive metric
# --------------------------------------------------------------------------

def _sqrt_cf_convergents(D: int, P: int, Q: int):
    """Convergents of ``(P + sqrt(D)) / Q`` for non-square ``D`` with ``Q | D - P^2``."""
    r = math.isqrt(D)
    h0, h1 = 1, 0
    k0, k1 = 0, 1
    while True:
        a = (P + r) // Q
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        yield h0, k0
        P = a * Q - P
        Q = (D - P * P) // Q


def _within_unit(k: int, p: int, q: int) -> bool:
    # |k - (p/q) sqrt(2)| <= 1  <=>  (k-1) q <= p sqrt(2) <= (k+1) q  for p, q > 0
    lo, hi = (k - 1) * q, (k + 1) * q
    if p < 0:
        return False
    return (lo <= 0 or lo * lo <= 2 * p * p) and 2 * p * p <= hi * hi


def hamel_coefficient(k: int) -> Fraction:
    """First continued-fraction convergent ``p/q`` of ``k/sqrt(2)`` with ``|k - (p/q) sqrt(2)| <= 1``."""
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    # k / sqrt(2) = sqrt(2 k^2) / 2
    for p, q in _sqrt_cf_convergents(2 * k * k, 0, 2):
        if _within_unit(k, p, q):
            return Fraction(p, q)


def hamel_witness_generator(basis: BasisDecl | None, k: int) -> tuple[QVector, QVector]:
    """``(x_k, y_k)`` with ``x_k = k e - r sqrt2e`` close to zero and ``y_k = -x_k + k e``.

    ``phi(x_k) = k`` while ``|embed(x_k)| <= 1``, so the ratio tends to 2.
    """
    basis = hamel_basis() if basis is None else basis
    for lb, val in (("e", 1.0), ("sqrt2e", SQRT2)):
        if lb not in basis.labels or abs(basis.embed_vector(basis.unit(lb))[0] - val) > 1e-12:
            raise ContractViolation(f"basis must declare {lb!r} embedded at {val}")
    k = int(k)
    r = -hamel_coefficient(k)
    x = QVector({"e": k, "sqrt2e": r})
    y = -x + basis.unit("e") * additive_functional(basis, x)
    return x, y


def hamel_gamma_lower(k: float, sigma: float) -> float:
    """``((2M)^s + (2M-2)^s) / (2^(s-1) * 2 * (1+M)^s)`` with ``M = k``."""
    M, s = float(k), float(sigma)
    return ((2 * M) ** s + (2 * M - 2) ** s) / (2.0 ** (s - 1.0) * 2.0 * (1.0 + M) ** s)
