import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import direct_log_abs, sinc_log, sinc_log_mp
from zerosets.errors import CoverageError, EmptyClusterError, NonConvergenceError, ZeroSetError
from zerosets.product_engine import (AT_ZERO, CONVERGED, NON_CONVERGED, LineEvaluator,
                                     ProductEvaluator, ProductVariant, eval_grid,
                                     log_abs_canonical, log_abs_partial, make_modified_variant,
                                     type_estimate)
from zerosets.weights import Weight
from zerosets.zero_model import (gen_integer_lattice, gen_one_sided, gen_perturbed_lattice,
                                 partition_near_real, validate_sequence)


def test_partial_four_terms():
    lat = gen_integer_lattice(2)
    v = log_abs_partial(lat, None, 0.5, 2.5)
    assert v == pytest.approx(math.log(0.703125), abs=1e-15)
    assert v == pytest.approx(-0.35222, abs=1e-5)


def test_partial_identities():
    lat = gen_integer_lattice(7)
    assert log_abs_partial(lat, None, 0, 100.0) == 0.0
    assert log_abs_partial(lat, None, 3, 100.0) == -math.inf
    # a zero beyond the radius does not count
    assert math.isfinite(log_abs_partial(lat, None, 7, 6.5))
    with pytest.raises(ZeroSetError):
        log_abs_partial(lat, None, 1, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-30, 30), st.floats(-5, 5), st.floats(1, 60))
def test_partial_matches_fsum_oracle(x, y, r):
    zs = gen_perturbed_lattice(40, Weight.log(1.0), 1.0, 3)
    z = complex(x, y)
    if np.any(zs.zeros == z):
        return
    inc = zs.zeros[zs.moduli <= r]
    assert log_abs_partial(zs, None, z, r) == pytest.approx(direct_log_abs(z, inc), abs=1e-11)


def test_canonical_lattice_examples(lattice5000):
    r = log_abs_canonical(lattice5000, None, 0.5, 1e-6)
    assert r.status == CONVERGED
    assert abs(r.value - math.log(2 / math.pi)) <= 1e-6 + r.tail_estimate
    assert r.value == pytest.approx(-0.451583, abs=1e-6)
    z = complex(0.25, 0.25)
    r = log_abs_canonical(lattice5000, None, z, 1e-6)
    assert abs(r.value - sinc_log_mp(z)) <= 1e-6 + r.tail_estimate
    assert r.tail_estimate >= 0


def test_canonical_one_sided_diverges():
    r = log_abs_canonical(gen_one_sided(10000), None, 5, 1e-6)
    assert r.status == NON_CONVERGED
    assert r.drift_steps >= 3
    # partial values fall roughly like -5 ln R
    v, R = np.array(r.ladder_values), np.array(r.ladder_radii)
    slope = np.polyfit(np.log(R), v, 1)[0]
    assert slope == pytest.approx(-5.0, rel=0.05)


def test_canonical_at_zero(lattice5000):
    r = log_abs_canonical(lattice5000, None, 7, 1e-6)
    assert r.status == AT_ZERO and r.value == -math.inf


def test_coverage_error():
    with pytest.raises(CoverageError):
        log_abs_canonical(gen_integer_lattice(50), None, 40, 1e-3)
    with pytest.raises(ZeroSetError):
        log_abs_canonical(gen_integer_lattice(50), None, 1, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-50, 50), st.floats(-3, 3))
def test_oracle_equivalence_property(x, y):
    z = complex(x, y)
    if abs(x - round(x)) < 0.05 and abs(y) < 0.05:
        return
    ev = _lattice_ev()
    r = ev.canonical(z, 1e-6)
    assert r.status == CONVERGED
    assert abs(r.value - float(sinc_log(z))) <= 1e-6 + r.tail_estimate


_EV = {}


def _lattice_ev():
    if "ev" not in _EV:
        _EV["ev"] = ProductEvaluator(gen_integer_lattice(5000))
    return _EV["ev"]


def test_monotone_refinement():
    ev = _lattice_ev()
    for z in (0.5, 3.3 + 0.7j, 21.25):
        r = ev.canonical(z, 1e-6)
        assert r.converged
        # completed ladder values approach the limit within their own tail bound
        assert abs(r.ladder_values[-1] - float(sinc_log(z))) <= r.tail_estimate + 1e-12
        for v in r.ladder_values[-3:]:
            assert abs(v - r.value) <= 1e-6 + r.tail_estimate


def test_conjugation_symmetry():
    zs = gen_perturbed_lattice(800, Weight.log(1.0), 1.0, 11)
    sym = validate_sequence(np.concatenate([zs.zeros, zs.zeros.conj()]))
    ev = ProductEvaluator(sym)
    for z in (3.3 + 1.2j, -17.1 + 4j, 40.5 - 2j):
        a, b = ev.canonical(z, 1e-3), ev.canonical(np.conj(z), 1e-3)
        assert a.value == pytest.approx(b.value, rel=1e-12, abs=1e-12)


def test_projected_equals_plain_on_real_sequence():
    lat = gen_integer_lattice(300)
    p = partition_near_real(lat, Weight.log(1.0), 1.0)
    a = ProductEvaluator(lat).canonical_many([2.5, 7.3 + 1j], 1e-3)
    b = ProductEvaluator(lat, ProductVariant.projected(p)).canonical_many([2.5, 7.3 + 1j], 1e-3)
    assert [r.value for r in a] == [r.value for r in b]


def test_modified_variant_lattice_example(lattice5000):
    p = partition_near_real(lattice5000, Weight.log(1.0), 1.0)
    var = make_modified_variant(lattice5000, p, 10.0)
    assert var.modification.m_j == 3
    assert sorted(lattice5000.re[list(var.modification.removed)]) == [9.0, 10.0, 11.0]
    psi = log_abs_canonical(lattice5000, None, 10.5, 1e-6).value
    psij = log_abs_canonical(lattice5000, var, 10.5, 1e-6).value
    expect = 3 * math.log(0.5) - (math.log(1.5) + 2 * math.log(0.5))
    assert psij - psi == pytest.approx(expect, abs=1e-10)
    assert log_abs_canonical(lattice5000, var, 10.0, 1e-6).value == -math.inf


@settings(max_examples=20, deadline=None)
@given(st.floats(-20, 20), st.floats(0.1, 3))
def test_modified_variant_identity(x, y):
    zs = gen_perturbed_lattice(600, Weight.log(1.0), 0.3, 5)
    p = partition_near_real(zs, Weight.log(1.0), 0.3)
    var = make_modified_variant(zs, p, 12.0)
    z = complex(x, y)
    base = ProductEvaluator(zs, ProductVariant.projected(p))
    mod = ProductEvaluator(zs, var)
    alphas = zs.re[list(var.modification.removed)]
    # with z in the upper half-plane no factor vanishes
    ident = var.modification.m_j * math.log(abs(z - 12.0)) - math.fsum(
        math.log(abs(z - a)) for a in alphas)
    for R in (50.0, 300.0):
        assert mod.partial(z, R) - base.partial(z, R) == pytest.approx(ident, abs=1e-10)


def test_modified_variant_empty_cluster():
    zs = gen_integer_lattice(20)
    p = partition_near_real(zs, Weight.log(1.0), 1.0)
    with pytest.raises(EmptyClusterError):
        make_modified_variant(zs, p, 30.0)


def test_half_projected_variant():
    zs = validate_sequence([(5, 0.5), (5, -0.5), (9, 3)])
    p = partition_near_real(zs, Weight.log(1.0), 1.0)
    ev = ProductEvaluator(zs, ProductVariant.half_projected(p))
    assert sorted(ev.zeros.tolist(), key=lambda z: (z.real, z.imag)) == [5 - 0.5j, 5, 9 + 3j]


def test_eval_grid_contract(lattice5000):
    pts = [0.5, 2 + 1j, 3.0]
    batch = eval_grid(lattice5000, None, pts, 1e-6)
    single = [log_abs_canonical(lattice5000, None, z, 1e-6) for z in pts]
    assert batch == single
    assert batch[2].status == AT_ZERO and batch[0].status == CONVERGED
    assert eval_grid(lattice5000, None, [], 1e-6) == []
    threaded = eval_grid(lattice5000, None, pts * 4, 1e-6, workers=3)
    assert threaded == single * 4


def test_eval_grid_flags_uncovered():
    res = eval_grid(gen_integer_lattice(50), None, [0.5, 45.0], 1e-3)
    assert res[0].status == CONVERGED and res[1].status == NON_CONVERGED


def test_local_expansion_matches_direct(lattice5000):
    ev = ProductEvaluator(lattice5000)
    loc = ev.localize(300.0, 20.0)
    pts = np.array([300.0 + 0.3, 290.1, 312.7 + 4j, 280.4])
    a = loc.canonical_many(pts, 1e-6)
    b = ev.canonical_many(pts, 1e-6)
    for r, s in zip(a, b):
        assert r.value == pytest.approx(s.value, abs=1e-9)
        assert r.status == s.status
    with pytest.raises(ZeroSetError):
        loc.canonical_many([330.0], 1e-6)


def test_line_evaluator_nan_for_uncovered():
    f = LineEvaluator(gen_integer_lattice(100))
    v = f(np.array([0.5, 90.0]))
    assert math.isfinite(v[0]) and math.isnan(v[1])


def test_type_estimates():
    lat = gen_integer_lattice(12000)
    assert type_estimate(lat, 100) == pytest.approx(math.pi, rel=0.05)
    half = validate_sequence(np.concatenate([lat.zeros / 2]))
    assert type_estimate(half, 100) == pytest.approx(2 * math.pi, rel=0.05)
    # a polynomial has type 0: the estimate is max ln(1 + y^2) / (2y) on [y_max/2, y_max]
    one = validate_sequence([1.0])
    assert type_estimate(one, 100) == pytest.approx(math.log1p(50.0 ** 2) / 100, rel=1e-12)
    assert type_estimate(one, 1e4) == pytest.approx(math.log1p(5000.0 ** 2) / 1e4, rel=1e-12)
    with pytest.raises(ZeroSetError):
        type_estimate(lat, 5)


def test_type_estimate_propagates_nonconvergence():
    # zeros j(1+i): Re(iy / mu_j) = y / (2j), a harmonic drift along the imaginary axis
    zs = validate_sequence(np.arange(1, 10001) * (1 + 1j))
    with pytest.raises(NonConvergenceError):
        type_estimate(zs, 100)
