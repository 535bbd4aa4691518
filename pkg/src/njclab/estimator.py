"""Lower-bound certificates for the constant by multi-scale random search.

The search evaluates a fixed seed set first (space-supplied pairs, probe
pairs ``(p, 0)``, ``(p, p)``, ``(p, q)`` and, for 2-homogeneous gauges, the
dual pairs ``(x+y, x-y)``), then runs ``restarts`` independent rounds.  Each
round draws pairs in chunks of 512 at the configured scales and refines the
best pair of each chunk by accept-if-better perturbation with a decaying step.

The reported value is the best ratio found, recomputed from its witness.  It
is a lower bound on the supremum; the bracket from the audited properties is
the only upper information attached.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from njclab import _pykernels, kernels
from njclab.core import (
    Bracket,
    ContractViolation,
    DegeneratePair,
    MetricSpace,
    Order,
    RatioSample,
    as_order,
    gauge_ratio,
    param_ratio,
    theorem_bounds,
)

CHUNK = 512
SCHEMA = "njc-lab/1"
LABEL = "lower-bound certificate + bracket"
IMPROVE_RTOL = 1e-12


class EstimationFailed(RuntimeError):
    """Every evaluated pair was degenerate."""


class FormulationUnavailable(RuntimeError):
    """The unit-sphere formulation needs an absolutely homogeneous gauge."""


class NoClosedForm(LookupError):
    """No registered closed form for this kind, parameters and order."""


class Formulation(str, enum.Enum):
    FULL = "FULL"
    UNIT_SPHERE = "UNIT_SPHERE"


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    restarts: int = 32
    samples_per_restart: int = 4096
    refine_steps: int = 200
    scales: tuple[float, ...] = (0.01, 1.0, 100.0)
    step_decay: float = 0.9
    step0: float = 0.1

    def __post_init__(self):
        if self.restarts < 1 or self.samples_per_restart < 1:
            raise ContractViolation("restarts and samples_per_restart must be >= 1")
        if self.refine_steps < 0:
            raise ContractViolation("refine_steps must be >= 0")
        if not self.scales or any(not s > 0 for s in self.scales):
            raise ContractViolation("scales must be a nonempty list of positive reals")
        if not 0.0 < self.step_decay < 1.0:
            raise ContractViolation("step_decay must lie in (0, 1)")
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))

    def budget(self) -> dict:
        return {
            "restarts": self.restarts,
            "samples_per_restart": self.samples_per_restart,
            "refine_steps": self.refine_steps,
            "scales": list(self.scales),
            "step_decay": self.step_decay,
        }


@dataclass
class ConstantEstimate:
    sigma: Order
    value: float
    witness: RatioSample
    bracket: Bracket
    formulation: Formulation
    closed_form: dict | None
    config: SearchConfig
    space_name: str = ""
    evaluated: int = 0

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_json(self, space: MetricSpace) -> dict:
        return {
            "schema": SCHEMA,
            "space": self.space_name,
            "sigma": self.sigma.sigma,
            "value": self.value,
            "witness": {"x": space.to_json(self.witness.x), "y": space.to_json(self.witness.y)},
            "bracket": self.bracket.to_json(),
            "formulation": self.formulation.value,
            "closed_form": self.closed_form,
            "budget": self.config.budget(),
            "seed": self.config.seed,
            "label": LABEL,
        }


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _conj(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def pmetric_constant(p, sigma) -> float | None:
    """Exact constant of the ``psi_p`` product of subadditive even Clarkson components.

    ``2^(s/p - s + 1)`` for ``p`` in (1, 2] and ``s`` in ``[p, q]``;
    ``2^(1 - s/p)`` for ``p`` in (2, inf) and ``s`` in ``[q, p]``; 2 for
    ``p`` in {1, inf}.  ``None`` outside these ranges.
    """
    p = float(p)
    s = as_order(sigma).sigma
    if p < 1.0:
        raise ContractViolation(f"p must be >= 1, got {p}")
    if p == 1.0 or math.isinf(p):
        return 2.0
    q = _conj(p)
    slack = 1e-12
    if p <= 2.0:
        if p - slack <= s <= q + slack:
            return 2.0 ** (s / p - s + 1.0)
        return None
    if q - slack <= s <= p + slack:
        return 2.0 ** (1.0 - s / p)
    return None


def closed_form_lookup(kind: str, sigma, params: dict | None = None) -> dict:
    """Registered exact constant for a space kind, or :class:`NoClosedForm`.

    Returns ``{"value": float, "source": str}``.
    """
    s = as_order(sigma).sigma
    params = dict(params or {})
    if kind == "truncated":
        if params.get("radius", 1.0) == 1.0 and 1.0 <= s <= 2.0:
            return {"value": 2.0 ** (2.0 - s), "source": "truncated clamp: 2^(2-sigma), sigma in [1, 2]"}
    elif kind == "frac-power":
        if math.isclose(params.get("exponent", 0.0), 0.2, rel_tol=0, abs_tol=1e-15) and s == 4.0:
            return {"value": 0.25, "source": "fifth-root metric at sigma = 4"}
    elif kind in ("norm", "pmetric"):
        p = float(params.get("p", 2.0))
        if p == 2.0 and s == 2.0:
            return {"value": 1.0, "source": "inner-product norm at sigma = 2"}
        if kind == "pmetric" or params.get("dim", 2) >= 2:
            v = pmetric_constant(p, s)
            if v is not None:
                return {"value": v, "source": f"p-metric constant, p = {p:g}"}
    elif kind == "rational-euclidean":
        if s == 2.0:
            return {"value": 1.0, "source": "rational coefficient Euclidean metric at sigma = 2"}
    elif kind == "hamel":
        return {"value": 2.0, "source": "Hamel-additive metric: supremum 2"}
    raise NoClosedForm(f"no closed form for kind {kind!r} at sigma={s:g} with {params}")


def closed_form_for(space: MetricSpace, sigma) -> dict | None:
    """:func:`closed_form_lookup` for a built space; ``None`` on a miss."""
    params = dict(space.params)
    params.setdefault("dim", space.dim)
    try:
        return closed_form_lookup(space.kind, sigma, params)
    except NoClosedForm:
        return None


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------

def _light_audit(space: MetricSpace, seed: int):
    from njclab.properties import audit

    return audit(space, samples=500, seed=seed, names=("even", "subadditive", "two_homogeneous", "absolutely_homogeneous"))


def seed_pairs(space: MetricSpace, dual: bool) -> list[tuple[Any, Any]]:
    """Deterministic pairs evaluated before any random draw."""
    pairs = list(space.seed_pairs())
    probes = list(space.probes())
    z = space.zero
    for p in probes:
        pairs += [(p, z), (p, p)]
    for p in probes:
        for q in probes:
            if not space.equal(p, q):
                pairs.append((p, q))
    if dual:
        pairs += [(x + y, x - y) for x, y in list(pairs)]
    return pairs


class _Best:
    def __init__(self):
        self.value = -math.inf
        self.x = None
        self.y = None
        self.evaluated = 0

    def offer(self, value, x, y):
        self.evaluated += 1
        if not math.isfinite(value):
            return
        if self.x is None or value > self.value * (1.0 + IMPROVE_RTOL):
            self.value, self.x, self.y = float(value), x, y


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _chunk_draws(space, cfg: SearchConfig, r: int, c: int):
    """512 pairs for chunk ``c`` of restart ``r``; independent of the budget."""
    rng = _rng(cfg.seed, r, 0, c)
    idx = (r + c * CHUNK + np.arange(CHUNK)) % len(cfg.scales)
    sx = np.asarray(cfg.scales)[idx]
    sy = sx * 10.0 ** rng.uniform(-1.0, 1.0, CHUNK)
    if space.array_based:
        X = space.sample_batch(rng, sx)
        Y = space.sample_batch(rng, sy)
    else:
        X = [space.sample(rng, s) for s in sx]
        Y = [space.sample(rng, s) for s in sy]
    return X, Y, np.maximum(sx, sy)


def _batch_ops(space):
    """Vectorized ratio and refinement: the compiled kernel if registered, else ``space.gauge_batch``."""
    if space.kernel is not None:
        k = space.kernel
        return (lambda X, Y, s, d: kernels.ratio_batch(k, X, Y, s, d),
                lambda X, Y, s, d, noise, st, dec: kernels.refine_pairs(k, X, Y, s, d, noise, st, dec))
    g = space.gauge_batch
    return (lambda X, Y, s, d: _pykernels.ratio_from_gauge(g, X, Y, s, d),
            lambda X, Y, s, d, noise, st, dec: _pykernels.refine_from_gauge(g, X, Y, s, d, noise, st, dec))


def _search_batch(space, s, cfg, best: _Best):
    ratio, refine = _batch_ops(space)
    for r in range(cfg.restarts):
        nchunks = -(-cfg.samples_per_restart // CHUNK)
        starts_x, starts_y, deltas = [], [], []
        for c in range(nchunks):
            X, Y, sc = _chunk_draws(space, cfg, r, c)
            n = min(CHUNK, cfg.samples_per_restart - c * CHUNK)
            X, Y, sc = X[:n], Y[:n], sc[:n]
            delta = _degen(s, sc)
            vals = ratio(X, Y, s, delta)
            best.evaluated += n
            if np.all(np.isnan(vals)):
                continue
            i = int(np.nanargmax(vals))
            best.offer(float(vals[i]), X[i].copy(), Y[i].copy())
            starts_x.append(X[i])
            starts_y.append(Y[i])
            deltas.append(delta[i])
        if not starts_x or cfg.refine_steps == 0:
            continue
        K = len(starts_x)
        noise = np.stack([
            _rng(cfg.seed, r, 1, c).standard_normal((cfg.refine_steps, 2 * space.dim)) for c in range(K)
        ])
        X, Y, vals = refine(np.array(starts_x), np.array(starts_y), s, np.array(deltas), noise,
                            np.full(K, cfg.step0), cfg.step_decay)
        best.evaluated += K * cfg.refine_steps
        for i in range(K):
            best.offer(float(vals[i]), X[i].copy(), Y[i].copy())


def _degen(s, scale):
    return 1e-12 * np.asarray(scale, dtype=np.float64) ** s


def _safe_ratio(space, s, x, y, scale):
    try:
        return gauge_ratio(space, s, x, y, scale=scale)
    except DegeneratePair:
        return math.nan


def _search_generic(space, s, cfg, best: _Best):
    for r in range(cfg.restarts):
        nchunks = -(-cfg.samples_per_restart // CHUNK)
        for c in range(nchunks):
            X, Y, sc = _chunk_draws(space, cfg, r, c)
            n = min(CHUNK, cfg.samples_per_restart - c * CHUNK)
            cbest = _Best()
            for i in range(n):
                cbest.offer(_safe_ratio(space, s, X[i], Y[i], sc[i]), X[i], Y[i])
            best.evaluated += n
            if cbest.x is None:
                continue
            best.offer(cbest.value, cbest.x, cbest.y)
            rng = _rng(cfg.seed, r, 1, c)
            x, y, v, step = cbest.x, cbest.y, cbest.value, cfg.step0
            for _ in range(cfg.refine_steps):
                xc, yc = space.perturb_pair(x, y, step, rng)
                vc = _safe_ratio(space, s, xc, yc, 0.0)
                best.evaluated += 1
                if vc > v:
                    x, y, v = xc, yc, vc
                else:
                    step *= cfg.step_decay
            best.offer(v, x, y)


def _bracket_and_report(space, s, cfg, report):
    if report is None:
        report = _light_audit(space, cfg.seed)
    return report, theorem_bounds(report, s)


def estimate(space: MetricSpace, sigma, config: SearchConfig | None = None, report=None,
             extra_pairs: Iterable | None = None) -> ConstantEstimate:
    """Best ratio over seeds, random draws and refined chains.

    ``report`` is a :class:`~njclab.properties.PropertyReport` supplying the
    bracket and whether dual pairs are added; a light audit is run when it is
    omitted.  ``extra_pairs`` are evaluated together with the seed set.
    """
    cfg = config or SearchConfig()
    order = as_order(sigma)
    s = order.sigma
    report, bracket = _bracket_and_report(space, s, cfg, report)
    dual = report.passed("two_homogeneous")
    best = _Best()
    pairs = seed_pairs(space, dual) + list(extra_pairs or [])
    for x, y in pairs:
        best.offer(_safe_ratio(space, s, x, y, 0.0), x, y)
    if space.array_based:
        _search_batch(space, s, cfg, best)
    else:
        _search_generic(space, s, cfg, best)
    if best.x is None:
        raise EstimationFailed(f"{space.name}: every evaluated pair was degenerate")
    x, y = best.x, best.y
    if dual:
        # keep the better of the witness and its dual
        xd, yd = x + y, x - y
        vd = _safe_ratio(space, s, xd, yd, 0.0)
        if vd > _safe_ratio(space, s, x, y, 0.0) * (1.0 + IMPROVE_RTOL):
            x, y = xd, yd
    value = gauge_ratio(space, s, x, y, scale=0.0)
    return ConstantEstimate(
        order, value, RatioSample(x, y, value), bracket, Formulation.FULL,
        closed_form_for(space, s), cfg, space.name, best.evaluated,
    )


def estimate_unit_sphere(space: MetricSpace, sigma, config: SearchConfig | None = None,
                         report=None) -> ConstantEstimate:
    """Maximize ``H(x, y, t)`` over ``f(x) = f(y) = 1`` and ``t`` in [0, 1].

    Requires an absolutely homogeneous gauge; the witness is stored as the
    pair ``(x, t y)``, whose ordinary ratio equals the parametrized one.
    """
    cfg = config or SearchConfig()
    order = as_order(sigma)
    s = order.sigma
    report, bracket = _bracket_and_report(space, s, cfg, report)
    if report.status("absolutely_homogeneous").value != "PASS":
        raise FormulationUnavailable(f"{space.name}: absolute homogeneity not established")
    if not space.array_based:
        raise FormulationUnavailable(f"{space.name}: unit-sphere search needs real coordinates")

    def normalize(X):
        F = space.gauge_batch(X)
        ok = F > 0
        out = np.zeros_like(X)
        out[ok] = X[ok] / F[ok][:, None]
        return out, ok

    def H(X, Y, T):
        num = space.gauge_batch(X + T[:, None] * Y) ** s + space.gauge_batch(X - T[:, None] * Y) ** s
        return num / (2.0 ** (s - 1.0) * (1.0 + T**s))

    best = _Best()
    probes = np.array(space.probes(), dtype=np.float64)
    P, ok = normalize(probes)
    P = P[ok]
    for x in P:
        for y in P:
            for t in (0.0, 1.0):
                best.offer(param_ratio(space, s, x, y, t), x, t * y)
    for r in range(cfg.restarts):
        nchunks = -(-cfg.samples_per_restart // CHUNK)
        for c in range(nchunks):
            rng = _rng(cfg.seed, r, 2, c)
            n = min(CHUNK, cfg.samples_per_restart - c * CHUNK)
            X, okx = normalize(rng.standard_normal((CHUNK, space.dim)))
            Y, oky = normalize(rng.standard_normal((CHUNK, space.dim)))
            T = rng.random(CHUNK)
            T[0], T[1] = 0.0, 1.0
            X, Y, T, ok = X[:n], Y[:n], T[:n], (okx & oky)[:n]
            vals = np.where(ok, H(X, Y, T), -np.inf)
            best.evaluated += n
            i = int(np.argmax(vals))
            if not np.isfinite(vals[i]):
                continue
            x, y, t, v = X[i], Y[i], T[i], float(vals[i])
            best.offer(v, x, t * y)
            noise = _rng(cfg.seed, r, 3, c).standard_normal((cfg.refine_steps, 2 * space.dim + 1))
            step = cfg.step0
            for k in range(cfg.refine_steps):
                xc, okc = normalize((x + step * noise[k, : space.dim])[None, :])
                yc, okd = normalize((y + step * noise[k, space.dim : 2 * space.dim])[None, :])
                tc = float(np.clip(t + step * noise[k, -1], 0.0, 1.0))
                if okc[0] and okd[0]:
                    vc = float(H(xc, yc, np.array([tc]))[0])
                else:
                    vc = -math.inf
                best.evaluated += 1
                if vc > v:
                    x, y, t, v = xc[0], yc[0], tc, vc
                else:
                    step *= cfg.step_decay
            best.offer(v, x, t * y)
    if best.x is None:
        raise EstimationFailed(f"{space.name}: no admissible unit-sphere pair")
    value = gauge_ratio(space, s, best.x, best.y, scale=0.0)
    return ConstantEstimate(
        order, value, RatioSample(best.x, best.y, value), bracket, Formulation.UNIT_SPHERE,
        closed_form_for(space, s), cfg, space.name, best.evaluated,
    )


# --------------------------------------------------------------------------
# explicit witness families
# --------------------------------------------------------------------------

@dataclass
class WitnessReport:
    sigma: float
    ks: list[int]
    ratios: list[float]
    skipped: list[int]
    best: float
    best_k: int | None
    monotone: bool

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "sigma": self.sigma,
            "k": self.ks,
            "gamma": self.ratios,
            "skipped": self.skipped,
            "best": self.best,
            "best_k": self.best_k,
            "monotone": self.monotone,
        }


def witness_sequence_bound(space: MetricSpace, generator: Callable[[int], tuple], sigma, k_max: int,
                           ks: Iterable[int] | None = None) -> WitnessReport:
    """Evaluate ``gamma_k = G(x_k, y_k)`` for ``k = 1..k_max`` (or the given ``ks``).

    Degenerate pairs are recorded in ``skipped``; ``best`` is a certified
    lower bound on the constant.
    """
    s = as_order(sigma).sigma
    if k_max < 1:
        raise ContractViolation("k_max must be >= 1")
    ks = list(range(1, k_max + 1)) if ks is None else [int(k) for k in ks]
    done, ratios, skipped = [], [], []
    for k in ks:
        x, y = generator(k)
        try:
            g = gauge_ratio(space, s, x, y, scale=0.0)
        except DegeneratePair:
            skipped.append(k)
            continue
        done.append(k)
        ratios.append(g)
    if not ratios:
        return WitnessReport(s, done, ratios, skipped, -math.inf, None, True)
    i = int(np.argmax(ratios))
    mono = all(b >= a - 1e-12 * max(abs(a), 1.0) for a, b in zip(ratios, ratios[1:]))
    return WitnessReport(s, done, ratios, skipped, float(ratios[i]), done[i], mono)


def max_sampled_ratio(space: MetricSpace, sigma, n_pairs: int, seed: int = 0,
                      scales=(0.01, 1.0, 100.0)) -> float:
    """Largest ratio over ``n_pairs`` raw draws split evenly across ``scales``."""
    s = as_order(sigma).sigma
    rng = _rng(seed, 9)
    out = -math.inf
    per = -(-n_pairs // len(scales))
    for sc in scales:
        sx = np.full(per, sc)
        if space.array_based:
            X, Y = space.sample_batch(rng, sx), space.sample_batch(rng, sx)
            v = _batch_ops(space)[0](X, Y, s, _degen(s, sx))
            if not np.all(np.isnan(v)):
                out = max(out, float(np.nanmax(v)))
        else:
            for _ in range(per):
                x, y = space.sample(rng, sc), space.sample(rng, sc)
                v = _safe_ratio(space, s, x, y, sc)
                if v == v:
                    out = max(out, v)
    return out
