"""Acceptance matrix: one test per criterion, run at the stated tolerances.

The terminal summary prints one PASS/FAIL line per criterion.
"""
import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from njclab import product, qspace, zoo
from njclab.core import gauge_ratio
from njclab.estimator import estimate, max_sampled_ratio, pmetric_constant, witness_sequence_bound
from njclab.oracle import power_mean_oracle
from njclab.properties import (
    Normability,
    Status,
    Tolerance,
    audit,
    check_clarkson,
    check_inner_product_axioms,
    check_property,
    check_reverse_clarkson,
    normability_verdict,
    polarization_form,
)
from njclab.reproduce import QSPACE_CONFIG

SIGMAS = (1.0, 1.5, 2.0, 3.0, 4.0)


def absval():
    return zoo.make_norm_induced(1, 2)


def test_criterion_01_truncated_metric():
    sp = zoo.make_truncated(2, 1.0)
    for s in (1.0, 1.5, 2.0):
        est = estimate(sp, s)
        exact = 2.0 ** (2.0 - s)
        assert exact - 1e-3 <= est.value <= exact + 1e-6, (s, est.value)
        assert sp.is_zero(est.witness.y) and not sp.is_zero(est.witness.x)


def test_criterion_02_fractional_power_metric():
    sp = zoo.make_fractional_power(2, 0.2)
    assert estimate(sp, 4).value == pytest.approx(0.25, abs=1e-3)
    assert max_sampled_ratio(sp, 4, 100_000, seed=0, scales=(0.01, 1.0, 100.0)) <= 0.25 + 1e-9


def test_criterion_03_norm_plus_square_metric():
    sp = zoo.make_norm_plus_square(2)
    e = np.array([1.0, 0.0])
    assert gauge_ratio(sp, 2, e, e) == 2.25
    assert estimate(sp, 2).value >= 2.25


def test_criterion_04_asymmetric_sum_metric():
    sp = zoo.make_asymmetric_sum(2)
    rep = witness_sequence_bound(sp, zoo.asym_sum_witnesses(sp), 1.0, 1000, ks=[1000])
    assert rep.best >= 3.49
    est = estimate(sp, 1.0)
    assert est.value > 2.0
    assert math.isinf(est.bracket.hi)


def test_criterion_05_hamel_additive_metric():
    sp = qspace.make_hamel_additive_metric()
    tight = Tolerance(rel=1e-12, abs=1e-12)
    assert check_property(sp, "subadditive", tol=tight).status is Status.PASS
    assert check_property(sp, "even").status is Status.PASS
    assert qspace.check_rational_homogeneity(sp).status is Status.PASS
    v = normability_verdict(sp, audit(sp, 1000))
    assert v.status is Normability.NON_NORMABLE
    assert v.witness["points"]["x"] == sp.basis.unit("e")
    assert float(v.witness["scalars"]["lam"]) == pytest.approx(math.sqrt(2))
    assert v.witness["lhs"] == pytest.approx(math.sqrt(2)) and v.witness["rhs"] == pytest.approx(2 * math.sqrt(2))
    # M_k = phi(x_k) = k
    x, _ = qspace.hamel_witness_generator(sp.basis, 1000)
    assert qspace.additive_functional(sp.basis, x) == 1000
    rep = witness_sequence_bound(sp, lambda k: qspace.hamel_witness_generator(sp.basis, k), 2.0, 1000, ks=[1000])
    assert rep.best >= 1.99
    assert max_sampled_ratio(sp, 2, 3000, seed=0) <= 2.0 + 1e-9
    from njclab.estimator import SearchConfig

    assert estimate(sp, 2, SearchConfig(**QSPACE_CONFIG)).value <= 2.0 + 1e-9


def test_criterion_06_rational_euclidean_metric():
    basis = qspace.three_label_basis()
    rnd = random.Random(0)

    def q():
        return Fraction(rnd.randint(-10**6, 10**6), rnd.randint(1, 10**4))

    def vec():
        return qspace.QVector({lb: q() for lb in basis.labels})

    assert all(qspace.rational_parallelogram_exact(basis, vec(), vec()) for _ in range(10_000))
    from njclab.estimator import SearchConfig

    sp = qspace.make_rational_euclidean_metric(basis)
    assert estimate(sp, 2, SearchConfig(**QSPACE_CONFIG)).value == pytest.approx(1.0, abs=1e-6)


PMETRIC_CASES = ((1, 2), (1.5, 2), (1.5, 1.5), (1.5, 3), (2, 2), (3, 2), (3, 1.5), (3, 3), (math.inf, 2))


def test_criterion_07_pmetric_constants():
    est = {}
    for p, s in PMETRIC_CASES:
        sp = product.make_product([absval(), absval()], product.make_psi_p(2, p))
        est[(p, s)] = estimate(sp, s).value
        assert est[(p, s)] == pytest.approx(pmetric_constant(p, s), abs=1e-2), (p, s)
    assert pmetric_constant(1, 2) == 2 and pmetric_constant(math.inf, 2) == 2
    assert pmetric_constant(1.5, 2) == pytest.approx(2 ** (1 / 3))
    for s in (1.5, 2, 3):
        assert est[(1.5, s)] == pytest.approx(est[(3, s)], abs=1e-2)


def test_criterion_08_transfer_bounds():
    psi1, psi2, psi_inf = (product.make_psi_p(2, p) for p in (1, 2, math.inf))
    m, M = product.min_max_ratio(psi1, psi2)
    assert m == pytest.approx(1.0, abs=1e-3) and M == pytest.approx(math.sqrt(2), abs=1e-3)
    b = product.transfer_bounds(1.0, m, M, 2)
    assert b.lo == pytest.approx(0.5, abs=1e-3) and b.hi == pytest.approx(2.0, abs=1e-3)
    c = estimate(product.make_product([absval(), absval()], psi1), 2).value
    assert c == pytest.approx(2.0, abs=1e-6)
    assert b.lo - 1e-6 <= c <= b.hi + 1e-6
    mm = product.min_max_ratio(psi_inf, psi2)
    v = product.dominating_exact_constant(mm.m, 2, product.Side.BELOW)
    assert v == pytest.approx(2.0, abs=1e-2)


def test_criterion_09_property_oracles():
    rng = np.random.default_rng(0)
    alphas = (0.2, 0.5, 1.0, 2.0, 4.0)
    ns = (2, 3, 5)
    ranges = {"I": lambda a: a <= 1, "II": lambda a: a >= 1, "III": lambda a: a <= 1}
    for variant, ok in ranges.items():
        valid = [a for a in alphas if ok(a)]
        for i in range(10_000):
            a, n = valid[i % len(valid)], ns[i % len(ns)]
            vals = rng.random(n) * 10.0 ** rng.uniform(-3, 3, n)
            b = rng.random(n) * 10.0 ** rng.uniform(-3, 3, n) if variant == "III" else None
            assert power_mean_oracle(a, vals, variant, b=b), (variant, a, vals, b)
    for alpha, beta in ((1.5, 3.0), (2.0, 2.0)):
        fwd = check_clarkson(absval(), alpha, beta, seed=4)
        rev = check_reverse_clarkson(absval(), alpha, beta, seed=4)
        assert fwd.status is Status.PASS and rev.status is Status.PASS


def test_criterion_10_polarization():
    sp = zoo.make_euclidean(3)
    rng = np.random.default_rng(0)
    X = rng.standard_normal((10_000, 3))
    Y = rng.standard_normal((10_000, 3))
    X /= np.linalg.norm(X, axis=1)[:, None]
    Y /= np.linalg.norm(Y, axis=1)[:, None]
    err = max(abs(polarization_form(sp, x, y) - float(x @ y)) for x, y in zip(X, Y))
    assert err <= 1e-12
    assert check_inner_product_axioms(sp, tol=Tolerance(rel=1e-9)).status is Status.PASS


def _bracket_spaces():
    absv = absval()
    return zoo.default_zoo(2) + [
        product.make_product([absv, absv], product.make_psi_p(2, 1.5)),
        product.make_product([zoo.make_truncated(1), absv], product.make_custom_psi("avg-2-inf", 2)),
    ]


def test_criterion_11_universal_bracket():
    for sp in _bracket_spaces():
        rep = audit(sp)
        for s in SIGMAS:
            v = estimate(sp, s, report=rep).value
            assert v >= 2.0 ** (2.0 - s) - 1e-9, (sp.name, s, v)
            if rep.passed("subadditive") and rep.passed("even"):
                assert v <= 2.0 + 1e-6, (sp.name, s, v)
            if rep.passed("two_homogeneous"):
                assert v >= 1.0 - 1e-9, (sp.name, s, v)
    from njclab.estimator import SearchConfig

    for sp in (qspace.make_hamel_additive_metric(), qspace.make_rational_euclidean_metric()):
        rep = audit(sp, 300)
        for s in (1.0, 2.0, 3.0):
            v = estimate(sp, s, SearchConfig(**QSPACE_CONFIG), report=rep).value
            assert 2.0 ** (2.0 - s) - 1e-9 <= v <= 2.0 + 1e-6


def test_criterion_11_determinism():
    from njclab.cli import main

    def once():
        outs = []
        for sp in zoo.default_zoo(2):
            outs.append(json.dumps(estimate(sp, 1.5).to_json(sp), sort_keys=True))
            outs.append(audit(sp, 500, seed=3).dumps(sp))
        return "\n".join(outs)

    assert once() == once()
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        pa, pb = Path(d) / "a.csv", Path(d) / "b.csv"
        assert main(["reproduce", "--format", "csv", "--out", str(pa)]) == 0
        assert main(["reproduce", "--format", "csv", "--out", str(pb)]) == 0
        a, b = pa.read_bytes(), pb.read_bytes()
    assert a == b
