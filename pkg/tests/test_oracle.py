import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from njclab.core import ContractViolation
from njclab.oracle import power_mean_chain, power_mean_oracle

vals = st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=6)


def test_examples():
    assert power_mean_chain(0.5, [1, 1], "I") == pytest.approx((2**0.5, 2.0, 2.0))
    assert power_mean_oracle(0.5, [1, 1], "I")
    assert power_mean_chain(2, [1, 1], "II") == pytest.approx((2.0, 4.0, 4.0))
    assert power_mean_oracle(2, [1, 1], "II")
    # (sqrt(1) + sqrt(1))^2 = 4 >= 1 + 1
    assert power_mean_chain(0.5, [1, 0], "III", b=[0, 1]) == pytest.approx((2.0, 4.0))
    assert power_mean_oracle(0.5, [1, 0], "III", b=[0, 1])


@pytest.mark.parametrize("alpha,variant", [(2, "I"), (0.5, "II"), (1.5, "III"), (0, "I")])
def test_alpha_ranges(alpha, variant):
    with pytest.raises(ContractViolation):
        power_mean_oracle(alpha, [1, 2], variant, b=[1, 1])


def test_input_contracts():
    for bad in ([], [-1.0], [np.inf]):
        with pytest.raises(ContractViolation):
            power_mean_oracle(0.5, bad, "I")
    with pytest.raises(ContractViolation):
        power_mean_oracle(0.5, [1, 2], "III")
    with pytest.raises(ContractViolation):
        power_mean_oracle(0.5, [1, 2], "III", b=[1])
    with pytest.raises(ContractViolation):
        power_mean_oracle(0.5, [1, 2], "IV")


def test_violations_are_detected():
    # the chain of II read with alpha < 1 breaks; evaluate the raw inequality directly
    a = np.array([1.0, 1.0])
    assert not (a**0.5).sum() <= a.sum() ** 0.5


@given(a=vals, alpha=st.floats(0.01, 1.0))
def test_variant_one(a, alpha):
    assert power_mean_oracle(alpha, a, "I")


@given(a=vals, alpha=st.floats(1.0, 8.0))
def test_variant_two(a, alpha):
    assert power_mean_oracle(alpha, a, "II")


@given(data=st.data(), alpha=st.floats(0.05, 1.0))
def test_variant_three(data, alpha):
    a = data.draw(vals)
    b = data.draw(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=len(a), max_size=len(a)))
    assert power_mean_oracle(alpha, a, "III", b=b)
