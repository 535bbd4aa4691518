import math

import numpy as np
import pytest

from njclab import product, zoo
from njclab.core import ContractViolation, gauge_ratio
from njclab.estimator import SearchConfig, estimate, pmetric_constant
from njclab.properties import Status, audit, check_metric_axioms, check_parallelogram, check_property
from njclab.product import (
    Side,
    SimplexFunction,
    audit_membership,
    check_clarkson_lift,
    dominating_exact_constant,
    make_custom_psi,
    make_product,
    make_psi_p,
    min_max_ratio,
    simplex_grid,
    transfer_bounds,
)

SMALL = SearchConfig(restarts=4, samples_per_restart=1024, refine_steps=100)


def absval():
    return zoo.make_norm_induced(1, 2)


def pair(p):
    return make_product([absval(), absval()], make_psi_p(2, p))


def test_psi_examples():
    assert make_psi_p(2, 2)([0.5, 0.5]) == pytest.approx(math.sqrt(0.5))
    assert make_psi_p(2, math.inf)([0.5, 0.5]) == 0.5
    for p in (1, 1.5, 2, 3, math.inf):
        psi = make_psi_p(3, p)
        assert psi([1, 0, 0]) == 1.0 and psi([0, 0, 1]) == 1.0
        assert psi.membership.status is Status.PASS
    with pytest.raises(ContractViolation):
        make_psi_p(2, 0.5)
    with pytest.raises(ContractViolation):
        make_psi_p(1, 2)


def test_simplex_grid():
    G = simplex_grid(3, 4)
    assert len(G) == 15
    np.testing.assert_allclose(G.sum(axis=1), 1.0)
    assert simplex_grid(2, 10).shape == (11, 2)


def test_membership_square_sum_fails_envelope():
    psi = SimplexFunction(2, lambda t: float(t[0] ** 2 + t[1] ** 2), name="sq")
    mem = audit_membership(psi, 20)
    assert mem.status is Status.FAIL
    assert mem.checks["vertex"].status is Status.PASS
    assert mem.checks["convexity"].status is Status.PASS
    assert mem.checks["envelope"].status is Status.FAIL
    # the point (0.7, 0.3) is on the grid: 0.58 < max = 0.7
    assert psi([0.7, 0.3]) == pytest.approx(0.58) and psi([0.7, 0.3]) < 0.7
    with pytest.raises(ContractViolation):
        make_product([absval(), absval()], psi)


def test_membership_constant_one():
    assert make_custom_psi("one", 2).membership.status is Status.PASS
    assert make_custom_psi("avg-2-inf", 3).membership.status is Status.PASS
    with pytest.raises(ContractViolation):
        make_custom_psi("nope", 2)
    with pytest.raises(ContractViolation):
        audit_membership(make_psi_p(2, 2), 1)


def test_non_convex_fails():
    psi = SimplexFunction(2, lambda t: float(max(t) ** 0.5), name="sqrt-max")
    assert audit_membership(psi, 32).checks["convexity"].status is Status.FAIL


def test_make_product_examples():
    assert pair(1).eval([1, 2], [0, 0]) == 3.0
    assert pair(math.inf).eval([1, 2], [0, 0]) == 2.0
    assert pair(2).eval([3, 4], [0, 0]) == pytest.approx(5.0)
    with pytest.raises(ContractViolation):
        make_product([absval()] * 3, make_psi_p(2, 2))


def test_product_of_custom_matches_formula():
    psi = make_custom_psi("avg-1-inf", 2)
    sp = make_product([zoo.make_euclidean(2), absval()], psi)
    x, y = np.array([3.0, 4.0, -2.0]), np.array([0.0, 0.0, 1.0])
    d = np.array([5.0, 3.0])
    S = d.sum()
    assert sp.eval(x, y) == pytest.approx(S * psi(d / S))
    assert sp.eval(x, x) == 0.0


def test_min_max_examples():
    p2, p1, pinf = make_psi_p(2, 2), make_psi_p(2, 1), make_psi_p(2, math.inf)
    m, M = min_max_ratio(p2, p2)
    assert (m, M) == (pytest.approx(1.0), pytest.approx(1.0))
    mm = min_max_ratio(p1, pinf)
    assert (mm.m, mm.M) == (pytest.approx(1.0, abs=1e-9), pytest.approx(2.0, abs=1e-9))
    np.testing.assert_allclose(mm.argmax, [0.5, 0.5], atol=1e-3)
    m, M = min_max_ratio(p2, pinf)
    assert m == pytest.approx(1.0, abs=1e-9) and M == pytest.approx(math.sqrt(2), abs=1e-6)
    with pytest.raises(ContractViolation):
        min_max_ratio(p2, make_psi_p(3, 2))


def test_transfer_bounds_examples():
    b = transfer_bounds(3.0, 1, 1, 2)
    assert (b.lo, b.hi) == (3.0, 3.0)
    b = transfer_bounds(1.0, 1, 2, 2)
    assert (b.lo, b.hi) == (0.25, 4.0)
    b = transfer_bounds(2.0, 1, math.sqrt(2), 2)
    assert (b.lo, b.hi) == (pytest.approx(1.0), pytest.approx(4.0))
    with pytest.raises(ContractViolation):
        transfer_bounds(1.0, 2, 1, 2)


def test_dominating_examples():
    assert dominating_exact_constant(math.sqrt(2), 2, Side.ABOVE) == pytest.approx(2.0)
    assert dominating_exact_constant(1 / math.sqrt(2), 2, "BELOW") == pytest.approx(2.0)
    for s in (1, 2, 3):
        assert dominating_exact_constant(1.0, s, Side.ABOVE) == pytest.approx(2 ** (1 - s / 2))
    with pytest.raises(ValueError):
        dominating_exact_constant(1.0, 2, "SIDEWAYS")


def test_clarkson_lift_examples():
    assert check_clarkson_lift([absval(), absval()], 1.5).status is Status.PASS
    assert check_clarkson_lift([zoo.make_euclidean(2), zoo.make_euclidean(2)], 1.5).status is Status.PASS
    res = check_clarkson_lift([zoo.make_norm_plus_square(1), absval()], 2)
    assert res.status is Status.SKIPPED
    direct = res.extra["direct"]
    assert direct.status is Status.FAIL
    assert direct.witness["lhs"] > direct.witness["rhs"]
    with pytest.raises(ContractViolation):
        check_clarkson_lift([absval(), absval()], 3)


PRODUCTS = [
    make_product([absval(), absval()], make_psi_p(2, 1.5)),
    make_product([zoo.make_euclidean(2), zoo.make_norm_induced(2, 1)], make_psi_p(2, 3)),
    make_product([zoo.make_truncated(1), zoo.make_fractional_power(1, 0.5)], make_psi_p(2, 2)),
    make_product([absval(), absval(), absval()], make_custom_psi("avg-2-inf", 3)),
]


@pytest.mark.parametrize("sp", PRODUCTS, ids=lambda s: s.name)
def test_product_is_metric_and_gauge_subadditive_even(sp):
    assert check_metric_axioms(sp, 500).passed
    assert check_property(sp, "subadditive", 500).passed
    assert check_property(sp, "even", 500).passed
    assert estimate(sp, 2, SMALL).value <= 2 + 1e-6


def test_pmetric_lower_bound_witnesses():
    for p in (1.5, 3):
        sp = pair(p)
        x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        for s in (1.5, 2, 3):
            if p <= 2:
                assert gauge_ratio(sp, s, x, y) == pytest.approx(2 ** (s / p - s + 1))
            else:
                assert gauge_ratio(sp, s, x + y, x - y) == pytest.approx(2 ** (1 - s / p))
    seeds = pair(1.5).seed_pairs()
    assert any(np.array_equal(a, [1, 0]) and np.array_equal(b, [0, 1]) for a, b in seeds)
    assert any(np.array_equal(a, [1, 1]) and np.array_equal(b, [1, -1]) for a, b in seeds)


def _sigma_grid(p):
    q = p / (p - 1)
    lo, hi = sorted((p, q))
    return [lo, 0.5 * (lo + hi), hi]


@pytest.mark.parametrize("p", [1.5, 2, 3])
def test_pmetric_constants(p):
    sp = pair(p)
    for s in _sigma_grid(p):
        assert estimate(sp, s).value == pytest.approx(pmetric_constant(p, s), abs=1e-2)


def test_transfer_invariant():
    phi = make_psi_p(2, 2)
    C_phi = 1.0
    for psi in (make_psi_p(2, 1), make_psi_p(2, 4), make_custom_psi("avg-1-inf", 2)):
        m, M = min_max_ratio(psi, phi)
        b = transfer_bounds(C_phi, m, M, 2)
        v = estimate(make_product([absval(), absval()], psi), 2, SMALL).value
        assert b.lo - 1e-6 <= v <= b.hi + 1e-6


def test_component_propagation():
    sp = pair(2)
    est = estimate(sp, 2, SMALL)
    assert est.value == pytest.approx(1.0, abs=1e-6)
    for i in range(2):
        assert check_parallelogram(product.embed_component(sp, i), 2, 300).passed


def test_product_kinds():
    assert pair(1.5).kind == "pmetric"
    assert make_product([zoo.make_norm_plus_square(1), absval()], make_psi_p(2, 2)).kind == "product"
    rep = audit(pair(3), 300)
    assert rep.profile()["absolutely_homogeneous"]


@pytest.mark.parametrize("sp", [
    make_product([zoo.make_truncated(1), absval()], make_custom_psi("avg-2-inf", 2)),
    make_product([zoo.make_norm_plus_square(2), absval()], make_psi_p(2, 1.5)),
    make_product([absval(), absval(), absval()], make_custom_psi("one", 3)),
], ids=lambda s: s.name)
def test_batch_gauge_matches_scalar(sp):
    assert sp.kernel is None
    X = np.random.default_rng(1).normal(size=(200, sp.dim)) * 10.0 ** np.arange(-2, 2).repeat(50)[:, None]
    X[0] = 0.0
    np.testing.assert_allclose(sp.gauge_batch(X), [sp.gauge(x) for x in X], rtol=1e-13, atol=0)
