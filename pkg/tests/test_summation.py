import math

import numpy as np
from hypothesis import given, settings, strategies as st

from zerosets.summation import compensated_cumsum, compensated_sum, segment_sums, two_sum

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_two_sum_is_error_free(a, b):
    s, e = two_sum(a, b)
    assert s == a + b
    # exact in rational arithmetic
    from fractions import Fraction
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


@settings(max_examples=200)
@given(st.lists(finite, min_size=0, max_size=300))
def test_compensated_sum_matches_fsum(xs):
    got = compensated_sum(np.array(xs, dtype=float)) if xs else compensated_sum(np.zeros(0))
    ref = math.fsum(xs)
    bound = 2.0 ** -52 * abs(ref) + (len(xs) * 2.0 ** -53) ** 2 * sum(abs(x) for x in xs)
    assert abs(got - ref) <= bound + 1e-300


def test_cancellation_beats_naive():
    xs = np.array([1e16, 1.0, -1e16, 1.0] * 50)
    assert compensated_sum(xs) == 100.0
    assert math.fsum(xs) == 100.0


def test_axis_and_rows():
    a = np.arange(12.0).reshape(3, 4)
    assert np.allclose(compensated_sum(a, axis=0), a.sum(axis=0))
    assert np.allclose(compensated_sum(a, axis=1), a.sum(axis=1))


def test_minus_inf_propagates():
    assert compensated_sum(np.array([1.0, -np.inf, 2.0])) == -np.inf
    out = compensated_sum(np.array([[1.0, 2.0], [-np.inf, 1.0]]))
    assert out[0] == 3.0 and out[1] == -np.inf


def test_segment_sums():
    v = np.arange(10.0)
    assert np.array_equal(segment_sums(v, [0, 3, 3, 10]), [3.0, 0.0, 42.0])


@given(st.lists(finite, min_size=1, max_size=60))
def test_cumsum_matches_prefix_fsum(xs):
    got = compensated_cumsum(np.array(xs))
    for i in range(len(xs)):
        ref = math.fsum(xs[:i + 1])
        assert abs(got[i] - ref) <= 1e-15 * sum(abs(x) for x in xs[:i + 1]) + 1e-300
