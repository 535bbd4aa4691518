import math

import numpy as np
import pytest

from njclab import zoo
from njclab.core import ContractViolation, gauge, gauge_ratio
from njclab.properties import Status, audit, check_metric_axioms

ZOO = zoo.default_zoo(2)


def test_truncated_examples():
    sp = zoo.make_truncated(2, 1.0)
    assert sp.eval([3, 0], [0, 0]) == 1.0
    assert sp.eval([0.4, -1.2], [0.4, -1.2]) == 0.0
    assert zoo.make_truncated(1, 1.0).eval([0.3], [0.0]) == pytest.approx(0.3)


def test_fractional_power_examples():
    sp = zoo.make_fractional_power(2, 0.2)
    assert sp.eval([32, 0], [0, 0]) == pytest.approx(2.0, rel=1e-15)
    one = zoo.make_fractional_power(2, 1.0)
    assert one.eval([3, 4], [0, 0]) == 5.0
    for bad in (0.0, 1.5, -0.2):
        with pytest.raises(ContractViolation):
            zoo.make_fractional_power(2, bad)


def test_norm_plus_square_examples():
    sp = zoo.make_norm_plus_square(2)
    assert sp.eval([2, 0], [0, 0]) == 6.0
    assert sp.eval([1, 7], [1, 7]) == 0.0
    assert gauge_ratio(sp, 2, [1, 0], [1, 0]) == 2.25
    # d(x, y) = |x - y| + | |x|^2 - |y|^2 |
    assert sp.eval([1, 0], [0, 2]) == pytest.approx(math.sqrt(5) + 3)


def test_asymmetric_sum_examples():
    sp = zoo.make_asymmetric_sum(2)
    assert gauge(sp, [-1, 0]) == 5.0
    assert gauge(sp, [1, 0]) == 2.0
    assert sp.eval([1, 1], [1, 1]) == 0.0
    assert sp.eval([1, 0], [-1, 0]) == 7.0
    with pytest.raises(ContractViolation):
        zoo.make_asymmetric_sum(2, [1.0, 1.0])


def test_asym_witnesses():
    sp = zoo.make_asymmetric_sum(2)
    x, y = zoo.asym_sum_witnesses(sp)(3)
    np.testing.assert_array_equal(x, [1, 0])
    np.testing.assert_array_equal(y, [3, 0])


def test_norm_induced_examples():
    assert zoo.make_norm_induced(2, 2).eval([1, 1], [0, 0]) == pytest.approx(math.sqrt(2))
    assert zoo.make_norm_induced(2, 1).eval([1, -2], [0, 0]) == 3.0
    assert zoo.make_norm_induced(2, math.inf).eval([1, -2], [0, 0]) == 2.0
    assert zoo.make_norm_induced(2, 3).eval([1, 2], [0, 0]) == pytest.approx(9 ** (1 / 3))
    with pytest.raises(ContractViolation):
        zoo.make_norm_induced(2, 0.5)


@pytest.mark.parametrize(
    "spec,kind",
    [("euclidean", "norm"), ("norm(1)", "norm"), ("norm(inf)", "norm"), ("truncated(2)", "truncated"),
     ("frac-power(1/5)", "frac-power"), ("norm-plus-square", "norm-plus-square"), ("asym-sum", "asym-sum")],
)
def test_make_space(spec, kind):
    assert zoo.make_space(spec, 3).kind == kind


def test_make_space_params():
    assert zoo.make_space("frac-power(1/5)").params["exponent"] == pytest.approx(0.2)
    with pytest.raises(ContractViolation):
        zoo.make_space("banana")
    with pytest.raises(ContractViolation):
        zoo.make_space("norm(")


def test_dimension_contract():
    with pytest.raises(ContractViolation):
        zoo.make_euclidean(0)


@pytest.mark.parametrize("space", ZOO, ids=lambda s: s.name)
def test_metric_axioms_at_default_budget(space):
    assert check_metric_axioms(space).status is Status.PASS


@pytest.mark.parametrize("space", ZOO, ids=lambda s: s.name)
def test_self_consistency(space):
    rep = audit(space, seed=1)
    assert rep.profile() == space.expected_properties
