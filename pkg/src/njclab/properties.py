"""Sampled structural audits of a metric and its gauge.

Every check walks a deterministic case stream (fixed probe points first, then
random points at the scales 0.01, 1 and 100) and evaluates one defining
relation per case.  A relation is either an inequality ``lhs <= rhs`` or an
equality ``lhs == rhs``; its *margin* is the slack normalized by
``max(|lhs|, |rhs|, abs_tol / rel_tol)``, so the pass rule ``margin >= -rel_tol``
means "relative tolerance with an absolute floor".

A PASS only means no counterexample was found in the recorded number of
samples.  A FAIL carries the first violating case as a witness, which
:func:`replay` re-evaluates through the public API.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

import numpy as np

from njclab.core import ContractViolation, MetricSpace, as_order

SCALES = (0.01, 1.0, 100.0)
DEFAULT_SAMPLES = 3000
SCHEMA = "njc-lab/1"


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-9
    abs: float = 1e-12

    @property
    def floor(self) -> float:
        return self.abs / self.rel


DEFAULT_TOL = Tolerance()


@dataclass
class CheckResult:
    status: Status
    margin: float = math.inf
    witness: dict | None = None
    samples: int = 0
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_json(self, space: MetricSpace | None = None) -> dict:
        out = {
            "status": self.status.value,
            "margin": None if math.isinf(self.margin) else self.margin,
            "samples": self.samples,
        }
        if self.witness is not None:
            out["witness"] = _witness_json(self.witness, space)
        if self.note:
            out["note"] = self.note
        return out


def _jsonable(v, space):
    if isinstance(v, np.ndarray):
        return [float(c) for c in v]
    if isinstance(v, (float, int, np.floating, np.integer)):
        return float(v)
    if space is not None and not isinstance(v, (str, dict, list)):
        try:
            return space.to_json(v)
        except Exception:  # scalars of exotic type
            return str(v)
    return v


def _witness_json(w: dict, space) -> dict:
    return {
        "relation": w["relation"],
        "points": {k: _jsonable(v, space) for k, v in w["points"].items()},
        "scalars": {k: (float(v) if not isinstance(v, str) else v) for k, v in w["scalars"].items()},
        "lhs": w["lhs"],
        "rhs": w["rhs"],
        "kind": w["kind"],
    }


@dataclass
class PropertyReport:
    space_id: str
    checks: dict[str, CheckResult]
    sample_count: int
    seed: int
    tolerance: Tolerance = DEFAULT_TOL

    def passed(self, name: str) -> bool:
        res = self.checks.get(name)
        return res is not None and res.status is Status.PASS

    def status(self, name: str) -> Status:
        res = self.checks.get(name)
        return Status.SKIPPED if res is None else res.status

    def profile(self) -> dict[str, bool]:
        return {k: v.passed for k, v in self.checks.items()}

    def to_json(self, space: MetricSpace | None = None) -> dict:
        return {
            "schema": SCHEMA,
            "space": self.space_id,
            "samples": self.sample_count,
            "seed": self.seed,
            "tolerance": {"rel": self.tolerance.rel, "abs": self.tolerance.abs},
            "label": f"no counterexample found in {self.sample_count} samples (seed {self.seed}) means PASS",
            "checks": {
                k: dict(v.to_json(space), seed=self.seed) for k, v in self.checks.items()
            },
        }

    def dumps(self, space: MetricSpace | None = None) -> str:
        return json.dumps(self.to_json(space), indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# relations: name -> function(space, points, scalars) -> (lhs, rhs, kind)
# --------------------------------------------------------------------------

def _f(space, x):
    return space.gauge(x)


def _scaled(space, x, lam):
    v = space.scale(x, lam)
    if v is None:
        raise _NotRepresentable
    return v


class _NotRepresentable(Exception):
    pass


def _rel_even(space, p, s):
    return _f(space, -p["x"]), _f(space, p["x"]), "eq"


def _rel_subadditive(space, p, s):
    x, y = p["x"], p["y"]
    return _f(space, x + y), _f(space, x) + _f(space, y), "le"


def _rel_midpoint(space, p, s):
    x, y = p["x"], p["y"]
    mid = _scaled(space, x + y, 0.5)
    return _f(space, mid), 0.5 * (_f(space, x) + _f(space, y)), "le"


def _rel_convex(space, p, s):
    x, y, lam = p["x"], p["y"], s["lam"]
    z = _scaled(space, x, lam) + _scaled(space, y, 1 - lam)
    lf = float(lam)
    return _f(space, z), lf * _f(space, x) + (1.0 - lf) * _f(space, y), "le"


def _rel_translation(space, p, s):
    x, y, z = p["x"], p["y"], p["z"]
    return space.eval(x + z, y + z), space.eval(x, y), "eq"


def _rel_homogeneous(space, p, s):
    x, lam = p["x"], s["lam"]
    return _f(space, _scaled(space, x, lam)), float(lam) * _f(space, x), "eq"


def _rel_abs_homogeneous(space, p, s):
    x, lam = p["x"], s["lam"]
    return _f(space, _scaled(space, x, lam)), abs(float(lam)) * _f(space, x), "eq"


def _rel_scaling_contraction(space, p, s):
    x, lam = p["x"], s["lam"]
    return _f(space, _scaled(space, x, lam)), float(lam) * _f(space, x), "le"


def _rel_half_contraction(space, p, s):
    x = p["x"]
    return _f(space, _scaled(space, x, 0.5)), 0.5 * _f(space, x), "le"


def _rel_symmetry(space, p, s):
    return space.eval(p["x"], p["y"]), space.eval(p["y"], p["x"]), "eq"


def _rel_identity(space, p, s):
    return space.eval(p["x"], p["x"]), 0.0, "eq"


def _rel_positivity(space, p, s):
    # encoded as "-d(x, y) < 0"; margin forced negative when d <= 0
    return 0.0, space.eval(p["x"], p["y"]), "lt"


def _rel_triangle(space, p, s):
    x, y, z = p["x"], p["y"], p["z"]
    return space.eval(x, z), space.eval(x, y) + space.eval(y, z), "le"


def _rel_parallelogram(space, p, s):
    x, y, sig = p["x"], p["y"], float(s["sigma"])
    lhs = _f(space, x + y) ** sig + _f(space, x - y) ** sig
    rhs = 2.0 ** (sig / 2.0) * (_f(space, x) ** sig + _f(space, y) ** sig)
    return lhs, rhs, "eq"


def _rel_clarkson(space, p, s):
    x, y, a, b = p["x"], p["y"], float(s["alpha"]), float(s["beta"])
    lhs = _f(space, x + y) ** b + _f(space, x - y) ** b
    rhs = 2.0 * (_f(space, x) ** a + _f(space, y) ** a) ** (b / a)
    return lhs, rhs, "le"


def _rel_reverse_clarkson(space, p, s):
    x, y, a, b = p["x"], p["y"], float(s["alpha"]), float(s["beta"])
    lhs = 2.0 * (_f(space, x) ** b + _f(space, y) ** b) ** (a / b)
    rhs = _f(space, x + y) ** a + _f(space, x - y) ** a
    return lhs, rhs, "le"


def polarization_form(space: MetricSpace, x, y) -> float:
    """``(f^2(x+y) - f^2(x-y)) / 4``: the candidate inner product."""
    return 0.25 * (_f(space, x + y) ** 2 - _f(space, x - y) ** 2)


def _rel_ip_symmetry(space, p, s):
    return polarization_form(space, p["x"], p["y"]), polarization_form(space, p["y"], p["x"]), "eq"


def _rel_ip_additivity(space, p, s):
    x, y, z = p["x"], p["y"], p["z"]
    lhs = polarization_form(space, x + y, z)
    rhs = polarization_form(space, x, z) + polarization_form(space, y, z)
    return lhs, rhs, "eq"


def _rel_ip_homogeneity(space, p, s):
    x, y, lam = p["x"], p["y"], s["lam"]
    return polarization_form(space, _scaled(space, x, lam), y), float(lam) * polarization_form(space, x, y), "eq"


def _rel_ip_diagonal(space, p, s):
    return polarization_form(space, p["x"], p["x"]), _f(space, p["x"]) ** 2, "eq"


RELATIONS: dict[str, Callable] = {
    "even": _rel_even,
    "subadditive": _rel_subadditive,
    "midpoint_convex": _rel_midpoint,
    "convex": _rel_convex,
    "translation_invariant": _rel_translation,
    "positively_homogeneous": _rel_homogeneous,
    "lambda_homogeneous": _rel_homogeneous,
    "two_homogeneous": _rel_homogeneous,
    "absolutely_homogeneous": _rel_abs_homogeneous,
    "scaling_contraction": _rel_scaling_contraction,
    "half_contraction": _rel_half_contraction,
    "symmetry": _rel_symmetry,
    "identity": _rel_identity,
    "positivity": _rel_positivity,
    "triangle": _rel_triangle,
    "parallelogram": _rel_parallelogram,
    "clarkson": _rel_clarkson,
    "reverse_clarkson": _rel_reverse_clarkson,
    "ip_symmetry": _rel_ip_symmetry,
    "ip_additivity": _rel_ip_additivity,
    "ip_homogeneity": _rel_ip_homogeneity,
    "ip_diagonal": _rel_ip_diagonal,
}


def relation_margin(lhs: float, rhs: float, kind: str, tol: Tolerance = DEFAULT_TOL) -> float:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return -math.inf
    scale = max(abs(lhs), abs(rhs), tol.floor)
    if kind == "le":
        return (rhs - lhs) / scale
    if kind == "lt":
        return (rhs - lhs) / scale if rhs > lhs else -1.0
    return 0.0 - abs(lhs - rhs) / scale


def replay(space: MetricSpace, witness: dict, tol: Tolerance = DEFAULT_TOL) -> float:
    """Re-evaluate a witness through the public API and return its margin."""
    lhs, rhs, kind = RELATIONS[witness["relation"]](space, witness["points"], witness["scalars"])
    return relation_margin(lhs, rhs, kind, tol)


# --------------------------------------------------------------------------
# case streams
# --------------------------------------------------------------------------

@dataclass
class _Draws:
    xs: list
    ys: list
    zs: list
    unit: np.ndarray  # uniform [0, 1) per sample
    signs: np.ndarray


def _draws(space: MetricSpace, samples: int, seed: int) -> _Draws:
    """Random points shared by every check with the same (space, samples, seed)."""
    rng = np.random.default_rng(seed)
    scales = np.array([SCALES[i % len(SCALES)] for i in range(samples)])
    if space.array_based:
        X = space.sample_batch(rng, scales)
        Y = space.sample_batch(rng, scales)
        Z = space.sample_batch(rng, scales)
        xs, ys, zs = list(X), list(Y), list(Z)
    else:
        xs = [space.sample(rng, s) for s in scales]
        ys = [space.sample(rng, s) for s in scales]
        zs = [space.sample(rng, s) for s in scales]
    unit = rng.random(samples)
    signs = np.where(rng.random(samples) < 0.5, -1.0, 1.0)
    return _Draws(xs, ys, zs, unit, signs)


def _probe_points(space):
    return [space.zero] + list(space.probes())


def _singles(space, d: _Draws):
    for x in _probe_points(space):
        yield {"x": x}
    for x in d.xs:
        yield {"x": x}


def _pairs(space, d: _Draws):
    probes = _probe_points(space)
    for x in probes:
        for y in probes:
            yield {"x": x, "y": y}
    for x, y in zip(d.xs, d.ys):
        yield {"x": x, "y": y}


def _triples(space, d: _Draws, limit: int = 512):
    probes = _probe_points(space)
    n = 0
    for x in probes:
        for y in probes:
            for z in probes:
                if n >= limit:
                    break
                n += 1
                yield {"x": x, "y": y, "z": z}
    for x, y, z in zip(d.xs, d.ys, d.zs):
        yield {"x": x, "y": y, "z": z}


class _Accumulator:
    def __init__(self, space, tol: Tolerance):
        self.space = space
        self.tol = tol
        self.margin = math.inf
        self.witness = None
        self.count = 0
        self.skipped = 0

    def add(self, relation: str, points: dict, scalars: dict | None = None):
        scalars = scalars or {}
        try:
            lhs, rhs, kind = RELATIONS[relation](self.space, points, scalars)
        except _NotRepresentable:
            self.skipped += 1
            return
        m = relation_margin(lhs, rhs, kind, self.tol)
        self.count += 1
        if m < self.margin:
            self.margin = m
        if m < -self.tol.rel and self.witness is None:
            self.witness = {
                "relation": relation,
                "points": dict(points),
                "scalars": dict(scalars),
                "lhs": float(lhs),
                "rhs": float(rhs),
                "kind": kind,
                "margin": m,
            }

    def result(self, note: str = "") -> CheckResult:
        if self.count == 0:
            return CheckResult(Status.SKIPPED, samples=0, note=note or "no representable cases")
        status = Status.FAIL if self.witness is not None else Status.PASS
        extra = {"skipped_cases": self.skipped} if self.skipped else {}
        return CheckResult(status, self.margin, self.witness, self.count, note, extra)


def _float_scalars(space) -> list:
    return list(space.extra_scalars())


# --------------------------------------------------------------------------
# public checks
# --------------------------------------------------------------------------

def check_metric_axioms(space: MetricSpace, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                        tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Symmetry, ``d(x, x) = 0``, positivity off the diagonal and the triangle inequality."""
    if samples < 1:
        raise ContractViolation("samples must be >= 1")
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for case in _triples(space, d):
        x, y = case["x"], case["y"]
        acc.add("symmetry", {"x": x, "y": y})
        acc.add("identity", {"x": x})
        if not space.equal(x, y):
            acc.add("positivity", {"x": x, "y": y})
        acc.add("triangle", case)
    return acc.result()


def _lambda_cases(space, name: str, d: _Draws, lam=None) -> Iterator[tuple[dict, dict]]:
    extras = _float_scalars(space)
    if name == "lambda_homogeneous":
        fixed, draw = [lam], None
    elif name == "two_homogeneous":
        fixed, draw = [2.0, 0.5, 4.0], None
    elif name == "positively_homogeneous":
        fixed = [0.5, 2.0] + [e for e in extras if float(e) > 0]
        draw = lambda i: 4.0 * d.unit[i]
    elif name == "absolutely_homogeneous":
        fixed = [0.5, 2.0, -1.0] + extras + [-e for e in extras]
        draw = lambda i: 4.0 * d.unit[i] * d.signs[i]
    elif name == "scaling_contraction":
        fixed = [0.25, 0.5, 0.75] + [e for e in extras if 0 <= float(e) <= 1]
        draw = lambda i: float(d.unit[i])
    else:
        raise ContractViolation(f"no scalar stream for {name}")
    for x in _probe_points(space):
        for lam_ in fixed:
            yield {"x": x}, {"lam": lam_}
    for i, x in enumerate(d.xs):
        if draw is None:
            yield {"x": x}, {"lam": fixed[i % len(fixed)]}
        else:
            yield {"x": x}, {"lam": float(draw(i))}
            for lam_ in fixed:
                yield {"x": x}, {"lam": lam_}


PROPERTY_NAMES = (
    "even",
    "subadditive",
    "midpoint_convex",
    "convex",
    "translation_invariant",
    "positively_homogeneous",
    "absolutely_homogeneous",
    "lambda_homogeneous",
    "scaling_contraction",
    "half_contraction",
)


def check_property(space: MetricSpace, prop: str, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                   lam=None, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Audit one gauge property on the shared case stream.

    ``prop`` is one of :data:`PROPERTY_NAMES`; ``lam`` is required exactly
    when ``prop == "lambda_homogeneous"``.
    """
    if prop not in PROPERTY_NAMES:
        raise ContractViolation(f"unknown property {prop!r}")
    if (lam is not None) != (prop == "lambda_homogeneous"):
        raise ContractViolation("lam must be given iff prop == 'lambda_homogeneous'")
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    if prop in ("even", "half_contraction"):
        for case in _singles(space, d):
            acc.add(prop, case)
    elif prop in ("subadditive", "midpoint_convex"):
        for case in _pairs(space, d):
            acc.add(prop, case)
    elif prop == "convex":
        extras = [e for e in _float_scalars(space) if 0 < float(e) < 1]
        weights = [0.25, 0.5, 0.75] + extras
        for i, case in enumerate(_pairs(space, d)):
            for w in weights:
                acc.add(prop, case, {"lam": w})
            acc.add(prop, case, {"lam": float(d.unit[i % samples])})
    elif prop == "translation_invariant":
        for case in _triples(space, d):
            acc.add(prop, case)
    else:
        for pts, sc in _lambda_cases(space, prop, d, lam):
            acc.add(prop, pts, sc)
    return acc.result()


def check_two_homogeneous(space: MetricSpace, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                          tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """``f(2x) = 2 f(x)``, plus the iterates ``f(x/2) = f(x)/2`` and ``f(4x) = 4 f(x)``."""
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for pts, sc in _lambda_cases(space, "two_homogeneous", d):
        acc.add("two_homogeneous", pts, sc)
    return acc.result()


def check_parallelogram(space: MetricSpace, sigma, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                        tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """``f^s(x+y) + f^s(x-y) = 2^(s/2) (f^s(x) + f^s(y))`` on sampled pairs."""
    s = as_order(sigma).sigma
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for case in _pairs(space, d):
        acc.add("parallelogram", case, {"sigma": s})
    return acc.result()


def _conjugate_check(alpha, beta):
    alpha, beta = float(alpha), float(beta)
    if not 1.0 < alpha <= 2.0:
        raise ContractViolation(f"alpha must lie in (1, 2], got {alpha}")
    if abs(1.0 / alpha + 1.0 / beta - 1.0) > 1e-12:
        raise ContractViolation(f"1/alpha + 1/beta must equal 1, got alpha={alpha}, beta={beta}")
    return alpha, beta


def check_clarkson(space: MetricSpace, alpha, beta, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                   tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """``f^b(x+y) + f^b(x-y) <= 2 (f^a(x) + f^a(y))^(b/a)`` for conjugate ``a, b``."""
    a, b = _conjugate_check(alpha, beta)
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for case in _pairs(space, d):
        acc.add("clarkson", case, {"alpha": a, "beta": b})
    return acc.result()


def check_reverse_clarkson(space: MetricSpace, alpha, beta, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                           tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """``2 (f^b(x) + f^b(y))^(a/b) <= f^a(x+y) + f^a(x-y)``."""
    a, b = _conjugate_check(alpha, beta)
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for case in _pairs(space, d):
        acc.add("reverse_clarkson", case, {"alpha": a, "beta": b})
    return acc.result()


def check_inner_product_axioms(space: MetricSpace, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                               tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Symmetry, additivity and homogeneity of :func:`polarization_form`."""
    d = _draws(space, samples, seed)
    acc = _Accumulator(space, tol)
    for i, case in enumerate(_triples(space, d, limit=0)):
        x, y, z = case["x"], case["y"], case["z"]
        acc.add("ip_symmetry", {"x": x, "y": y})
        acc.add("ip_additivity", case)
        acc.add("ip_homogeneity", {"x": x, "y": y}, {"lam": float(4.0 * d.unit[i] * d.signs[i])})
        acc.add("ip_diagonal", {"x": x})
    return acc.result()


# --------------------------------------------------------------------------
# aggregate audits and verdicts
# --------------------------------------------------------------------------

def audit(space: MetricSpace, samples: int = DEFAULT_SAMPLES, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
          names=None) -> PropertyReport:
    """Run the standard property set (or ``names``) and collect a report."""
    from njclab.zoo import STANDARD_PROPERTIES

    names = STANDARD_PROPERTIES if names is None else names
    checks = {}
    for name in names:
        if name == "metric_axioms":
            checks[name] = check_metric_axioms(space, samples, seed, tol)
        elif name == "two_homogeneous":
            checks[name] = check_two_homogeneous(space, samples, seed, tol)
        else:
            checks[name] = check_property(space, name, samples, seed, tol=tol)
    return PropertyReport(space.name, checks, samples, seed, tol)


class Normability(str, enum.Enum):
    NORMABLE = "NORMABLE"
    NON_NORMABLE = "NON_NORMABLE"
    UNDECIDED = "UNDECIDED"


@dataclass
class Verdict:
    status: Normability
    reason: str
    witness: dict | None = None

    def to_json(self, space=None):
        out = {"status": self.status.value, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = _witness_json(self.witness, space)
        return out


EQUIVALENT_CONDITIONS = (
    "midpoint_convex",
    "convex",
    "scaling_contraction",
    "half_contraction",
    "positively_homogeneous",
    "absolutely_homogeneous",
)


def normability_verdict(space: MetricSpace, report: PropertyReport) -> Verdict:
    """Decide whether the gauge is a norm from audited properties.

    The gauge is a norm exactly when it is midpoint convex and absolutely
    homogeneous.  A FAIL witness for either settles NON_NORMABLE.  Only when
    one of the two was not audited does translation invariance plus one of the
    equivalent conditions decide NORMABLE.
    """
    mc, ah = report.status("midpoint_convex"), report.status("absolutely_homogeneous")
    if mc is Status.PASS and ah is Status.PASS:
        return Verdict(Normability.NORMABLE, "midpoint convex and absolutely homogeneous")
    for name in ("absolutely_homogeneous", "midpoint_convex"):
        if report.status(name) is Status.FAIL:
            return Verdict(Normability.NON_NORMABLE, f"{name} fails", report.checks[name].witness)
    if report.status("translation_invariant") is Status.PASS:
        for name in EQUIVALENT_CONDITIONS:
            if report.status(name) is Status.PASS:
                return Verdict(Normability.NORMABLE, f"translation invariant and {name}")
    return Verdict(Normability.UNDECIDED, "required audits skipped")


def equivalence_consistency(space: MetricSpace, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                            tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Do the six homogeneity/convexity conditions agree on a translation-invariant metric?

    SKIPPED unless translation invariance passes.  On disagreement the witness
    lists which conditions passed and which failed, with each failing witness.
    """
    ti = check_property(space, "translation_invariant", samples, seed, tol=tol)
    if not ti.passed:
        return CheckResult(Status.SKIPPED, note="translation invariance not established")
    results = {name: check_property(space, name, samples, seed, tol=tol) for name in EQUIVALENT_CONDITIONS}
    statuses = {name: r.status for name, r in results.items()}
    n = sum(r.samples for r in results.values())
    if len(set(statuses.values())) == 1:
        return CheckResult(Status.PASS, 0.0, None, n, note=f"all conditions {next(iter(statuses.values())).value}",
                           extra={"conditions": {k: v.value for k, v in statuses.items()}})
    failing = [k for k, v in statuses.items() if v is Status.FAIL]
    first = results[failing[0]].witness if failing else None
    return CheckResult(
        Status.FAIL,
        min(r.margin for r in results.values()),
        first,
        n,
        note="conditions disagree",
        extra={"conditions": {k: v.value for k, v in statuses.items()}},
    )
