import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zerosets.errors import NonMonotoneWeightError, ZeroSetError
from zerosets.weights import Weight, check_weight, extrapolate_limit


def test_families_evaluate():
    assert Weight.log(2.0)(5.0) == pytest.approx(2 * math.log(7))
    assert Weight.power(0.5)(3.0) == pytest.approx(2.0)
    assert Weight.exp_sqrt_log(1.0)(0.0) == pytest.approx(math.e)
    tab = Weight.tabulated([0, 10], [1, 3])
    assert tab(5.0) == pytest.approx(2.0)
    assert tab(100.0) == 3.0
    assert np.allclose(Weight.log()(np.array([0.0, 1.0])), np.log([2.0, 3.0]))


def test_spec_roundtrip():
    for w in (Weight.log(1.5), Weight.power(0.3), Weight.exp_sqrt_log(2.0),
              Weight.tabulated([0, 1, 4], [1, 2, 2])):
        assert Weight.from_spec(w.to_spec()) == w
    assert Weight.from_spec({"family": "log", "c": "1.0"}) == Weight.log(1.0)


@pytest.mark.parametrize("bad", [
    lambda: Weight.log(0), lambda: Weight.power(-1), lambda: Weight("nope"),
    lambda: Weight.tabulated([0], [1]), lambda: Weight.tabulated([1, 2], [1, 2]),
    lambda: Weight.tabulated([0, 1], [0.5, 2]),
])
def test_invalid_weights(bad):
    with pytest.raises(ZeroSetError):
        bad()


def test_tabulated_decreasing_rejected():
    with pytest.raises(NonMonotoneWeightError):
        Weight.tabulated([0, 1, 2], [2, 3, 2.5])


def test_check_weight_log_passes():
    rep = check_weight(Weight.log(1.0), 1e6)
    assert rep.passed
    assert rep.cond1.limit_estimate == pytest.approx(1.0, abs=0.05)
    assert rep.cond2_limsup_estimate == pytest.approx(0.0, abs=0.05)
    assert rep.cond3_sup_estimate == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("t_max", [1e3, 1e4, 1e8])
def test_log_passes_at_every_tmax(t_max):
    assert check_weight(Weight.log(1.0), t_max).passed


def test_power_06_fails_cond2_only():
    rep = check_weight(Weight.power(0.6), 1e6)
    assert rep.verdicts == {"cond1": True, "cond2": False, "cond3": True}
    assert rep.cond2_limsup_estimate == pytest.approx(0.6, abs=0.05)


def test_power_025_passes():
    rep = check_weight(Weight.power(0.25), 1e6)
    assert rep.passed
    assert rep.cond2_limsup_estimate == pytest.approx(0.25, abs=0.05)
    assert rep.cond3_sup_estimate == pytest.approx(2 ** 0.25, abs=0.05)


def test_constant_tabulated_fails_cond1():
    rep = check_weight(Weight.tabulated([0, 1], [1, 1]), 1e6)
    assert not rep.cond1.passed


def test_check_weight_preconditions():
    with pytest.raises(ZeroSetError):
        check_weight(Weight.log(), 100)
    with pytest.raises(ZeroSetError):
        check_weight(Weight.log(), 1e6, k=1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.95))
def test_power_cond2_tracks_exponent(p):
    rep = check_weight(Weight.power(p), 1e6)
    assert rep.cond2_limsup_estimate == pytest.approx(p, abs=0.05)
    if p < 0.4:
        assert rep.cond2.passed
    elif p > 0.5:
        assert not rep.cond2.passed


def test_extrapolate_constant_profile():
    u = np.linspace(10, 14, 20)
    assert extrapolate_limit(u, np.full(20, 0.3), 0.0) == pytest.approx(0.3)
    assert extrapolate_limit(u, 0.5 + 2.0 / u, 0.0) == pytest.approx(0.5, abs=1e-6)
