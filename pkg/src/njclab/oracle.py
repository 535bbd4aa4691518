"""Power-mean inequalities used as independent test oracles.

Variant ``"I"`` (``0 < a <= 1``):  ``(sum a_i)^a <= sum a_i^a <= n^(1-a) (sum a_i)^a``.
Variant ``"II"`` (``a >= 1``):     ``sum a_i^a <= (sum a_i)^a <= n^(a-1) sum a_i^a``.
Variant ``"III"`` (``0 < a <= 1``): ``(sum (a_i+b_i)^a)^(1/a) >= (sum a_i^a)^(1/a) + (sum b_i^a)^(1/a)``.
"""
from __future__ import annotations

import numpy as np

from njclab.core import ContractViolation

RTOL = 1e-12


def _le(a: float, b: float) -> bool:
    return a <= b + RTOL * max(abs(a), abs(b), 1e-300)


def power_mean_chain(alpha: float, values, variant: str, b=None) -> tuple[float, ...]:
    """The terms of the chain, smallest side first."""
    alpha = float(alpha)
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 1 or len(a) == 0:
        raise ContractViolation("values must be a nonempty 1-D sequence")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ContractViolation("values must be finite and nonnegative")
    n = len(a)
    if variant == "I":
        if not 0.0 < alpha <= 1.0:
            raise ContractViolation(f"variant I needs alpha in (0, 1], got {alpha}")
        s = a.sum() ** alpha
        return s, float((a**alpha).sum()), n ** (1.0 - alpha) * s
    if variant == "II":
        if not alpha >= 1.0:
            raise ContractViolation(f"variant II needs alpha >= 1, got {alpha}")
        t = float((a**alpha).sum())
        return t, a.sum() ** alpha, n ** (alpha - 1.0) * t
    if variant == "III":
        if not 0.0 < alpha <= 1.0:
            raise ContractViolation(f"variant III needs alpha in (0, 1], got {alpha}")
        if b is None:
            raise ContractViolation("variant III needs the second sequence b")
        bb = np.asarray(b, dtype=np.float64)
        if bb.shape != a.shape or np.any(bb < 0) or not np.all(np.isfinite(bb)):
            raise ContractViolation("b must be finite, nonnegative and match values")
        A = (a**alpha).sum() ** (1.0 / alpha)
        B = (bb**alpha).sum() ** (1.0 / alpha)
        return A + B, ((a + bb) ** alpha).sum() ** (1.0 / alpha)
    raise ContractViolation(f"unknown variant {variant!r}; expected I, II or III")


def power_mean_oracle(alpha: float, values, variant: str, b=None) -> bool:
    """True when the chain of the given variant holds (relative slack 1e-12)."""
    chain = power_mean_chain(alpha, values, variant, b)
    return all(_le(x, y) for x, y in zip(chain, chain[1:]))
