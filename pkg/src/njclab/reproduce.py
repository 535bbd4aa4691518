"""The table of closed-form constants and how each row is reproduced."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from njclab import product, qspace, zoo
from njclab.estimator import SearchConfig, estimate, witness_sequence_bound

QSPACE_CONFIG = dict(restarts=2, samples_per_restart=512, refine_steps=50)

CSV_COLUMNS = ("space", "sigma", "reference_value", "estimated", "abs_diff", "bracket_lo", "bracket_hi", "status")


@dataclass
class Row:
    space: str
    sigma: float
    reference_value: float
    estimated: float
    bracket_lo: float
    bracket_hi: float
    lo_tol: float
    hi_tol: float
    method: str = "estimate"

    @property
    def abs_diff(self) -> float:
        return abs(self.estimated - self.reference_value)

    @property
    def ok(self) -> bool:
        return self.reference_value - self.lo_tol <= self.estimated <= self.reference_value + self.hi_tol

    @property
    def status(self) -> str:
        return "OK" if self.ok else "MISMATCH"


def fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def _est_row(label, space, sigma, ref, lo_tol, hi_tol, cfg):
    e = estimate(space, sigma, cfg)
    return Row(label, float(sigma), ref, e.value, e.bracket.lo, e.bracket.hi, lo_tol, hi_tol)


def reproduce_rows(seed: int = 0, config: SearchConfig | None = None) -> list[Row]:
    """Every row of the reproduction table, in a fixed order."""
    cfg = config or SearchConfig(seed=seed)
    qcfg = SearchConfig(seed=cfg.seed, **QSPACE_CONFIG)
    rows = []
    tr = zoo.make_truncated(2, 1.0)
    for s in (1.0, 1.5, 2.0):
        rows.append(_est_row("truncated(1)", tr, s, 2.0 ** (2.0 - s), 1e-3, 1e-6, cfg))
    rows.append(_est_row("frac-power(1/5)", zoo.make_fractional_power(2, 0.2), 4.0, 0.25, 1e-3, 1e-3, cfg))
    rows.append(_est_row("euclidean", zoo.make_euclidean(2), 2.0, 1.0, 1e-6, 1e-6, cfg))
    # lower-bound rows: the reference value is a witness value, not the supremum
    rows.append(_est_row("norm-plus-square", zoo.make_norm_plus_square(2), 2.0, 2.25, 0.0, math.inf, cfg))

    asym = zoo.make_asymmetric_sum(2)
    wr = witness_sequence_bound(asym, zoo.asym_sum_witnesses(asym), 1.0, 1000, ks=[1000])
    rows.append(Row("asym-sum (k=1000 witness)", 1.0, 3.5, wr.best, 2.0, math.inf, 1e-2, 0.0, "witness"))

    hamel = qspace.make_hamel_additive_metric()
    hw = witness_sequence_bound(hamel, lambda k: qspace.hamel_witness_generator(hamel.basis, k), 2.0, 1000, ks=[1000])
    rows.append(Row("hamel-additive (k=1000 witness)", 2.0, 2.0, hw.best, 1.0, 2.0, 1e-2, 1e-9, "witness"))

    rows.append(_est_row("rational-euclidean", qspace.make_rational_euclidean_metric(), 2.0, 1.0, 1e-6, 1e-6, qcfg))

    absval = zoo.make_norm_induced(1, 2.0)
    for p, s in ((1, 2), (1.5, 2), (1.5, 1.5), (1.5, 3), (2, 2), (3, 2), (3, 1.5), (3, 3), (math.inf, 2)):
        sp = product.make_product([absval, absval], product.make_psi_p(2, p))
        ref = product.pmetric_constant(p, s)
        rows.append(_est_row(f"p-metric(p={fmt(float(p))})", sp, s, ref, 1e-2, 1e-2, cfg))

    psi2, psi_inf = product.make_psi_p(2, 2), product.make_psi_p(2, math.inf)
    mm = product.min_max_ratio(psi_inf, psi2, seed=cfg.seed)
    corr = product.dominating_exact_constant(mm.m, 2.0, product.Side.BELOW)
    rows.append(Row("dominated psi_inf vs psi_2", 2.0, 2.0, corr, 1.0, 2.0, 1e-2, 1e-2, "corollary"))
    return rows


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.space, fmt(r.sigma), fmt(r.reference_value), fmt(r.estimated), fmt(r.abs_diff),
                    fmt(r.bracket_lo), fmt(r.bracket_hi), r.status])
    return buf.getvalue()


def rows_to_json(rows: list[Row]) -> dict:
    return {
        "schema": "njc-lab/1",
        "rows": [
            {
                "space": r.space,
                "sigma": r.sigma,
                "reference_value": r.reference_value,
                "estimated": r.estimated,
                "abs_diff": r.abs_diff,
                "bracket": {"lo": r.bracket_lo, "hi": None if math.isinf(r.bracket_hi) else r.bracket_hi},
                "method": r.method,
                "status": r.status,
            }
            for r in rows
        ],
    }
