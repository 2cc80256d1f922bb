import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonlim import capacity as C
from photonlim.numerics import LOG2E, binary_entropy

TWO_OVER_LN2 = 2.0 / math.log(2.0)


def test_mode_count():
    assert C.mode_count(C.LinkGeometry(1, 1, 2)) == 2
    assert C.mode_count(C.LinkGeometry(1, 1, 1)) == 1
    assert C.mode_count(C.LinkGeometry(10, 2.5, 2)) == 50
    with pytest.raises(ValueError):
        C.LinkGeometry(0, 1)
    with pytest.raises(ValueError):
        C.LinkGeometry(1, 1, 3)


def test_ppm_capacity(oracle):
    assert C.ppm_capacity(0.0, 8) == 0.0
    assert C.ppm_capacity(50.0, 8) == pytest.approx(3.0, abs=1e-15)
    assert C.ppm_capacity(1.0, 2) == pytest.approx(oracle["ppm_cap_E1_M2"], abs=1e-15)
    p = C.ppm_point(1.0, 4)
    assert p.die == pytest.approx(C.ppm_capacity(1.0, 4) / 4)
    assert p.pie == pytest.approx(C.ppm_capacity(1.0, 4))
    with pytest.raises(ValueError):
        C.ppm_capacity(1.0, 1)
    with pytest.raises(ValueError):
        C.ppm_capacity(1.0, 2.5)


def test_ppm_envelope_examples(oracle):
    p = C.ppm_optimal_point(1.0)
    assert p.pie == pytest.approx(oracle["ppm_cp_estar1"], rel=1e-14)
    small = C.ppm_optimal_point(1e-6)
    assert small.energy * small.pie == pytest.approx(TWO_OVER_LN2, rel=1e-5)
    with pytest.raises(ValueError):
        C.ppm_optimal_point(0.0)


def test_ppm_order_growth():
    # E* log2 M* -> 2 / ln 2
    p = C.ppm_optimal_point(1e-4)
    assert p.energy * p.aux == pytest.approx(TWO_OVER_LN2, rel=0.01)


@given(st.floats(1e-2, 20.0))
def test_ppm_envelope_consistency(e_star):
    c_p, log2_m, log2_cd = C.ppm_envelope_terms(e_star)
    # substitute the optimum back into the general PPM objective
    q = -math.expm1(-e_star)
    M = 2.0**log2_m
    cap = q * log2_m
    assert cap / e_star == pytest.approx(c_p, rel=1e-12)
    assert math.log2(cap / M) == pytest.approx(log2_cd, abs=1e-9)
    assert log2_cd + c_p == pytest.approx(C.ppm_objective(e_star, c_p), abs=1e-9)


@given(st.floats(1e-3, 5.0))
def test_ppm_envelope_is_stationary(e_star):
    # the envelope maximizes the objective over E at fixed c_p
    c_p = C.ppm_envelope_terms(e_star)[0]
    best = C.ppm_objective(e_star, c_p)
    for f in (0.99, 1.01):
        assert C.ppm_objective(e_star * f, c_p) <= best + 1e-12


def test_ppm_optimal_at_pie_roundtrip():
    for c_p in (1.5, 4.0, 10.0, 20.0):
        p = C.ppm_optimal_at_pie(c_p)
        assert p.pie == pytest.approx(c_p, rel=1e-12)


def test_holevo_examples():
    assert C.holevo_unconstrained(1.0).die == pytest.approx(2.0, abs=1e-15)
    zero = C.holevo_unconstrained(0.0)
    assert zero.die == 0.0 and zero.pie is None
    E = 1e-9
    p = C.holevo_unconstrained(E)
    assert math.log2(p.die / p.pie) + p.pie == pytest.approx(LOG2E, rel=1e-6)
    with pytest.raises(ValueError):
        C.holevo_unconstrained(-1.0)


def test_holevo_at_pie_roundtrip():
    for c_p in (2.0, 8.0, 16.0):
        assert C.holevo_at_pie(c_p).pie == pytest.approx(c_p, rel=1e-12)


def test_gaussian_receivers():
    assert C.heterodyne(1.0).die == pytest.approx(1.0, abs=1e-15)
    assert C.heterodyne(1e-7).pie == pytest.approx(LOG2E, rel=1e-6)
    assert C.homodyne(1e-7).pie == pytest.approx(2 * LOG2E, rel=1e-6)
    assert C.homodyne(1.0).die == pytest.approx(0.5 * math.log2(5.0))


def test_binary_pure_holevo():
    for E in (0.01, 0.3, 2.0):
        got = C.binary_pure_holevo(math.exp(-4 * E), 0.5)
        assert got == pytest.approx(binary_entropy(0.5 * (1 - math.exp(-2 * E))), abs=1e-12)
    assert C.binary_pure_holevo(1.0, 0.3) == 0.0
    assert C.binary_pure_holevo(0.0, 0.3) == pytest.approx(binary_entropy(0.3), abs=1e-15)


def test_bpsk_dolinar(oracle):
    assert C.bpsk_dolinar_capacity(0.5).die == pytest.approx(oracle["bpsk_dolinar_cd_E0.5"], abs=1e-15)
    assert C.bpsk_dolinar_capacity(30.0).die == pytest.approx(1.0, abs=1e-15)
    assert C.bpsk_dolinar_capacity(1e-7).pie == pytest.approx(2 * LOG2E, rel=1e-6)


def test_bpsk_dolinar_monotone():
    grid = np.geomspace(1e-4, 10, 300)
    pts = C.tradeoff_curve("bpsk-dolinar", grid)
    die = [p.die for p in pts]
    pie = [p.pie for p in pts]
    # die saturates at exactly 1 in double precision once e^{-4E} is negligible
    assert all(b >= a for a, b in zip(die, die[1:]))
    assert all(b > a for a, b, E in zip(die, die[1:], grid[1:]) if E < 4)
    assert all(b < a for a, b in zip(pie, pie[1:]))


def test_ook_counting(oracle):
    assert C.ook_counting_mi(0.3, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert C.ook_counting_mi(40.0, 0.5) == pytest.approx(1.0, abs=1e-12)
    p = C.ook_counting_capacity(0.1)
    assert p.die == pytest.approx(oracle["ook_counting_E0.1"], abs=1e-12)
    assert p.aux == pytest.approx(oracle["ook_counting_xi_E0.1"], rel=1e-4)
    with pytest.raises(ValueError):
        C.ook_counting_capacity(0.0)


def test_ook_dolinar(oracle):
    p = C.ook_dolinar_capacity(0.1)
    assert p.die == pytest.approx(oracle["ook_dolinar_E0.1"], abs=1e-12)
    assert p.aux == pytest.approx(oracle["ook_dolinar_xi_E0.1"], rel=1e-4)
    duty = [C.ook_dolinar_capacity(E).aux for E in (1.0, 0.1, 0.01, 1e-3)]
    assert all(b < a for a, b in zip(duty, duty[1:]))


def test_ook_holevo(oracle):
    p = C.ook_holevo_capacity(0.1)
    assert p.die == pytest.approx(oracle["ook_holevo_E0.1"], abs=1e-12)
    assert p.aux == pytest.approx(oracle["ook_holevo_xi_E0.1"], rel=1e-4)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-4, 10.0))
def test_dominance_chain(E):
    top = C.holevo_unconstrained(E).die
    hol = C.ook_holevo_capacity(E).die
    dol = C.ook_dolinar_capacity(E).die
    cnt = C.ook_counting_capacity(E).die
    assert top >= hol - 1e-9
    assert hol >= dol - 1e-9
    assert dol >= cnt - 1e-9


def test_approximations(oracle):
    for c_p in (0.5, 3.0, 17.0):
        assert C.approx1(c_p) * 2**c_p == pytest.approx(2 / (math.e * math.log(2)), rel=1e-14)
        assert C.approx2(c_p) / C.approx1(c_p) == pytest.approx(math.e**2 * math.log(2) / 2 * c_p, rel=1e-12)
    assert round(2 / (math.e * math.log(2)), 3) == 1.061
    assert round(C.RATIO_CONST, 3) == 2.561
    assert C.approx2(1.0) == pytest.approx(oracle["approx2_1"], rel=1e-15)


def test_approx1_is_a_line():
    grid = np.linspace(1, 20, 39)
    pts = C.tradeoff_curve("approx1", grid)
    y = np.log2([p.die for p in pts])
    slope = np.diff(y) / np.diff(grid)
    assert np.allclose(slope, -1.0, atol=1e-12)
    assert all(p.pie == c for p, c in zip(pts, grid))


@given(st.floats(0.0, 1.0))
def test_reciprocal_identity(s):
    assert abs(C.reciprocal_identity(s) - 1.0) <= 1e-12


def test_reciprocal_identity_examples():
    expect = binary_entropy(0.25) + 1 - binary_entropy(0.25)
    assert C.reciprocal_identity(0.25) == pytest.approx(expect, abs=1e-15)
    assert C.reciprocal_identity(0.0) == pytest.approx(1.0, abs=1e-15)
    assert C.reciprocal_identity(1.0) == pytest.approx(1.0, abs=1e-15)


def test_tradeoff_curve_basic():
    (p,) = C.tradeoff_curve(C.Scheme.HOLEVO_UNCONSTRAINED, [1.0])
    assert (p.energy, p.die, p.pie) == (1.0, pytest.approx(2.0), pytest.approx(2.0))
    fixed = C.tradeoff_curve("ppm-counting-fixed", [0.5, 1.0], m=16)
    assert [q.aux for q in fixed] == [16.0, 16.0]


def test_tradeoff_curve_errors():
    with pytest.raises(ValueError):
        C.tradeoff_curve("holevo", [])
    with pytest.raises(ValueError):
        C.tradeoff_curve("holevo", [1.0, 0.5])
    with pytest.raises(ValueError):
        C.tradeoff_curve("holevo", [0.0, 1.0])
    with pytest.raises(ValueError):
        C.tradeoff_curve("ppm-counting-fixed", [1.0])
    with pytest.raises(ValueError):
        C.tradeoff_curve("holevo", [1.0], m=4)
    with pytest.raises(ValueError):
        C.tradeoff_curve("no-such-scheme", [1.0])


@pytest.mark.parametrize("scheme", [s for s in C.Scheme if s is not C.Scheme.PPM_COUNTING_FIXED_M])
def test_point_invariants(scheme):
    grid = np.geomspace(0.05, 5.0, 7)
    for p in C.tradeoff_curve(scheme, grid):
        assert p.die >= 0 and p.pie is not None and p.pie >= 0
        assert p.die == pytest.approx(p.pie * p.energy, rel=1e-9) or scheme is C.Scheme.PPM_COUNTING_OPTIMAL


def test_ppm_envelope_die_per_slot_energy():
    # the envelope's photon budget is per PPM slot: c_d = c_p * E* / M*
    p = C.ppm_optimal_point(0.7)
    assert p.die == pytest.approx(p.pie * p.energy / 2**p.aux, rel=1e-12)
