import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from njclab import qspace, zoo
from njclab.core import ContractViolation, MetricSpace
from njclab.properties import (
    EQUIVALENT_CONDITIONS,
    Normability,
    Status,
    Tolerance,
    audit,
    check_clarkson,
    check_inner_product_axioms,
    check_metric_axioms,
    check_parallelogram,
    check_property,
    check_reverse_clarkson,
    check_two_homogeneous,
    equivalence_consistency,
    normability_verdict,
    polarization_form,
    relation_margin,
    replay,
)

N = 400


def squared_distance_line():
    return MetricSpace("squared", 1, lambda x, y: float((x[0] - y[0]) ** 2))


def absval():
    return zoo.make_norm_induced(1, 2)


E1 = np.array([1.0, 0.0])


def test_metric_axioms_examples():
    assert check_metric_axioms(zoo.make_euclidean(2), N).status is Status.PASS
    assert check_metric_axioms(zoo.make_fractional_power(2, 0.2), N).status is Status.PASS
    res = check_metric_axioms(squared_distance_line(), N)
    assert res.status is Status.FAIL
    assert res.witness["relation"] == "triangle"
    assert res.witness["lhs"] > res.witness["rhs"]


def test_hand_triangle_violation_replays():
    w = {"relation": "triangle", "points": {"x": np.array([0.0]), "y": np.array([1.0]), "z": np.array([2.0])},
         "scalars": {}}
    # d(0,2)=4 > d(0,1)+d(1,2)=2
    assert replay(squared_distance_line(), w) == pytest.approx(-0.5)


def test_subadditive_witness_is_e_e():
    res = check_property(zoo.make_norm_plus_square(2), "subadditive", N)
    assert res.status is Status.FAIL
    w = res.witness
    np.testing.assert_array_equal(w["points"]["x"], E1)
    np.testing.assert_array_equal(w["points"]["y"], E1)
    assert (w["lhs"], w["rhs"]) == (6.0, 4.0)


def test_property_examples():
    assert check_property(zoo.make_truncated(2), "even", N).status is Status.PASS
    assert check_property(zoo.make_fractional_power(2, 0.2), "subadditive", N).status is Status.PASS
    assert check_property(zoo.make_asymmetric_sum(2), "even", N).status is Status.FAIL


def test_lambda_homogeneous_requires_lambda():
    sp = zoo.make_euclidean(2)
    with pytest.raises(ContractViolation):
        check_property(sp, "lambda_homogeneous", N)
    with pytest.raises(ContractViolation):
        check_property(sp, "even", N, lam=2.0)
    with pytest.raises(ContractViolation):
        check_property(sp, "bogus", N)
    assert check_property(sp, "lambda_homogeneous", N, lam=3.0).passed
    assert not check_property(zoo.make_truncated(2), "lambda_homogeneous", N, lam=3.0).passed


def test_two_homogeneous_examples():
    assert check_two_homogeneous(zoo.make_euclidean(2), N).passed
    res = check_two_homogeneous(zoo.make_truncated(2), N)
    assert res.status is Status.FAIL
    np.testing.assert_array_equal(res.witness["points"]["x"], E1)
    assert (res.witness["lhs"], res.witness["rhs"]) == (1.0, 2.0)
    res = check_two_homogeneous(zoo.make_fractional_power(2, 0.2), N)
    assert res.status is Status.FAIL
    np.testing.assert_array_equal(res.witness["points"]["x"], E1)
    assert res.witness["lhs"] == pytest.approx(2**0.2)


def test_parallelogram_examples():
    assert check_parallelogram(zoo.make_euclidean(2), 2, N).passed
    assert check_parallelogram(qspace.make_rational_euclidean_metric(), 2, 100).passed
    res = check_parallelogram(zoo.make_norm_induced(2, 1), 2, N)
    assert res.status is Status.FAIL
    pts = res.witness["points"]
    np.testing.assert_array_equal(pts["x"], E1)
    np.testing.assert_array_equal(pts["y"], [0.0, 1.0])
    assert (res.witness["lhs"], res.witness["rhs"]) == (8.0, 4.0)


@pytest.mark.parametrize("a,b", [(2, 2), (1.5, 3)])
def test_clarkson_absolute_value(a, b):
    assert check_clarkson(absval(), a, b, N).passed
    assert check_reverse_clarkson(absval(), a, b, N).passed


def test_clarkson_against_grid_oracle():
    # independent dense grid over [-10, 10]^2 for the absolute-value gauge
    g = np.linspace(-10, 10, 201)
    x, y = np.meshgrid(g, g)
    lhs = np.abs(x + y) ** 3 + np.abs(x - y) ** 3
    rhs = 2 * (np.abs(x) ** 1.5 + np.abs(y) ** 1.5) ** 2
    assert np.all(lhs <= rhs * (1 + 1e-12))
    rl = 2 * (np.abs(x) ** 3 + np.abs(y) ** 3) ** 0.5
    rr = np.abs(x + y) ** 1.5 + np.abs(x - y) ** 1.5
    assert np.all(rl <= rr * (1 + 1e-12) + 1e-12)


def test_reverse_clarkson_euclidean():
    assert check_reverse_clarkson(zoo.make_euclidean(2), 1.5, 3, N).passed


def test_clarkson_norm_plus_square_fails():
    res = check_clarkson(zoo.make_norm_plus_square(2), 2, 2, N)
    assert res.status is Status.FAIL
    assert (res.witness["lhs"], res.witness["rhs"]) == (36.0, 16.0)


@pytest.mark.parametrize("a,b", [(1.0, math.inf), (2.5, 5 / 3), (1.5, 2.9)])
def test_clarkson_contract(a, b):
    with pytest.raises(ContractViolation):
        check_clarkson(absval(), a, b, 10)


def test_normability_examples():
    rep = audit(zoo.make_euclidean(2), N)
    assert normability_verdict(zoo.make_euclidean(2), rep).status is Normability.NORMABLE
    tr = zoo.make_truncated(2)
    v = normability_verdict(tr, audit(tr, N))
    assert v.status is Normability.NON_NORMABLE
    assert v.witness["lhs"] != v.witness["rhs"]
    assert replay(tr, v.witness) < -1e-9


def test_normability_hamel_sqrt2_witness():
    sp = qspace.make_hamel_additive_metric()
    v = normability_verdict(sp, audit(sp, 200))
    assert v.status is Normability.NON_NORMABLE
    w = v.witness
    assert w["points"]["x"] == sp.basis.unit("e")
    assert float(w["scalars"]["lam"]) == pytest.approx(math.sqrt(2))
    assert w["lhs"] == pytest.approx(math.sqrt(2)) and w["rhs"] == pytest.approx(2 * math.sqrt(2))


def test_normability_undecided_without_audits():
    from njclab.properties import PropertyReport

    rep = PropertyReport("x", {}, 0, 0)
    assert normability_verdict(zoo.make_euclidean(2), rep).status is Normability.UNDECIDED


def test_equivalence_consistency_examples():
    res = equivalence_consistency(zoo.make_euclidean(2), N)
    assert res.status is Status.PASS
    assert set(res.extra["conditions"].values()) == {"PASS"}
    res = equivalence_consistency(zoo.make_truncated(2), N)
    assert res.status is Status.PASS
    assert set(res.extra["conditions"].values()) == {"FAIL"}
    assert equivalence_consistency(zoo.make_norm_plus_square(2), N).status is Status.SKIPPED


def test_equivalence_consistency_hamel_disagrees():
    # Without continuity the six conditions separate: rational scalings are
    # exact, irrational ones are not.
    res = equivalence_consistency(qspace.make_hamel_additive_metric(), 200)
    assert res.status is Status.FAIL
    c = res.extra["conditions"]
    assert c["midpoint_convex"] == c["half_contraction"] == "PASS"
    assert c["absolutely_homogeneous"] == c["convex"] == "FAIL"
    assert set(c) == set(EQUIVALENT_CONDITIONS)


def test_polarization_euclidean():
    sp = zoo.make_euclidean(3)
    r = np.random.default_rng(0)
    for _ in range(200):
        x, y = r.normal(size=3), r.normal(size=3)
        assert polarization_form(sp, x, y) == pytest.approx(x @ y, abs=1e-12)
    assert check_inner_product_axioms(sp, N).passed
    assert not check_inner_product_axioms(zoo.make_norm_induced(3, 1), N).passed


def test_relation_margin():
    t = Tolerance()
    assert relation_margin(1.0, 2.0, "le", t) == 0.5
    assert relation_margin(2.0, 1.0, "le", t) == -0.5
    assert relation_margin(1.0, 1.0, "eq", t) == 0.0
    assert math.copysign(1.0, relation_margin(1.0, 1.0, "eq", t)) == 1.0
    assert relation_margin(0.0, 0.0, "lt", t) == -1.0
    assert relation_margin(math.nan, 1.0, "le", t) == -math.inf


def test_determinism():
    sp = zoo.make_asymmetric_sum(2)
    a, b = audit(sp, N, seed=5), audit(sp, N, seed=5)
    assert a.dumps(sp) == b.dumps(sp)
    assert '"schema": "njc-lab/1"' in a.dumps(sp)


@pytest.mark.parametrize("space", zoo.default_zoo(2) + [qspace.make_hamel_additive_metric()],
                         ids=lambda s: s.name)
def test_every_fail_witness_replays(space):
    tol = Tolerance()
    rep = audit(space, 300, seed=11)
    for name, res in rep.checks.items():
        if res.status is Status.FAIL:
            assert replay(space, res.witness, tol) <= -tol.rel, name


@given(seed=st.integers(0, 2**31), samples=st.integers(1, 40))
def test_fail_witness_replay_property(seed, samples):
    for space in (zoo.make_truncated(2), zoo.make_norm_plus_square(2), zoo.make_asymmetric_sum(2)):
        for prop in ("subadditive", "even", "absolutely_homogeneous", "convex"):
            res = check_property(space, prop, samples, seed)
            if res.status is Status.FAIL:
                assert replay(space, res.witness) <= -1e-9
                assert res.margin <= res.witness["margin"]


TWO_HOMOGENEOUS = [s for s in zoo.default_zoo(2) if s.expected_properties["two_homogeneous"]] + [
    zoo.make_norm_induced(1, 2), zoo.make_norm_induced(2, 1.5)]


@pytest.mark.parametrize("space", TWO_HOMOGENEOUS, ids=lambda s: s.name)
@pytest.mark.parametrize("a,b", [(1.5, 3), (2, 2), (1.25, 5)])
def test_clarkson_equivalence_on_shared_samples(space, a, b):
    assert check_two_homogeneous(space, 300).passed
    fwd = check_clarkson(space, a, b, 1000, seed=3)
    rev = check_reverse_clarkson(space, a, b, 1000, seed=3)
    assert fwd.status == rev.status


@pytest.mark.parametrize("space", [zoo.make_euclidean(2), zoo.make_norm_induced(1, 2),
                                   qspace.make_rational_euclidean_metric()], ids=lambda s: s.name)
def test_parallelogram_gives_closed_constant(space):
    from njclab.estimator import SearchConfig, estimate

    s = 2.0
    assert check_two_homogeneous(space, 200).passed and check_parallelogram(space, s, 200).passed
    cfg = SearchConfig(restarts=2, samples_per_restart=512, refine_steps=30)
    assert estimate(space, s, cfg).value == pytest.approx(2 ** (1 - s / 2), abs=1e-9)
