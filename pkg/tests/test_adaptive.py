import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bayes_oracle as oracle_mod
from photonlim import adaptive as A
from photonlim.binary_channel import capacity_per_use, state_likelihoods
from photonlim.numerics import LOG2E

PARITY = {"000", "011", "101", "110"}


def test_builtin_codes():
    assert set(A.parity32().words()) == PARITY
    assert A.uncoded(1).words() == ["0", "1"]
    assert len(A.uncoded(3)) == 8


def test_hamming_constraint_oracle():
    valid = set()
    for x in itertools.product((0, 1), repeat=7):
        x1, x2, x3, x4, x5, x6, x7 = x
        if x5 == x1 ^ x2 ^ x3 and x6 == x1 ^ x2 ^ x4 and x7 == x1 ^ x3 ^ x4:
            valid.add("".join(map(str, x)))
    code = A.hamming74()
    assert (code.n, code.k) == (7, 4)
    assert set(code.words()) == valid and len(valid) == 16


def test_make_code_kinds(tmp_path):
    assert A.make_code("parity32").name == "parity32"
    assert A.make_code("hamming74").k == 4
    assert A.make_code("uncoded:2").n == 2
    assert set(A.make_code(["00", "11"]).words()) == {"00", "11"}
    f = tmp_path / "rep.txt"
    f.write_text("# repetition\n000\n\n111\n")
    code = A.make_code(f"file:{f}")
    assert (code.n, code.k) == (3, 1)
    with pytest.raises(ValueError):
        A.make_code("golay")


@pytest.mark.parametrize("words", [[], ["01", "1"], ["00", "01", "10"], ["00", "00"], ["02", "11"]])
def test_explicit_code_rejects(words):
    with pytest.raises(ValueError):
        A.explicit_code(words)


def test_code_file_rejects_symbols(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("0a\n11\n")
    with pytest.raises(ValueError):
        A.load_code_file(f)


def test_next_xi_uncoded_is_half():
    code = A.uncoded(3)
    s = math.exp(-2.0)
    for prefix, _, state in A.posterior_tree(code, s):
        if state.j <= code.n:
            assert A.next_xi(state, code) == pytest.approx(0.5, abs=1e-15)


def test_next_xi_parity_first_bit():
    code = A.parity32()
    assert A.next_xi(A.initial_state(code), code) == 0.5
    with pytest.raises(IndexError):
        A.next_xi(A.PosteriorState(np.full(4, 0.25), 4), code)


@pytest.mark.parametrize("y1,y2", list(itertools.product((0, 1), repeat=2)))
def test_next_xi_matches_bayes(y1, y2):
    code = A.parity32()
    s = A.bpsk_overlap(0.5)
    state = A.initial_state(code)
    for y in (y1, y2):
        state = A.update_posterior(state, code, y, state_likelihoods(s, A.next_xi(state, code)))
    want = oracle_mod.xi_after(code.codewords, (y1, y2), s)
    assert A.next_xi(state, code) == pytest.approx(want, abs=1e-12)


def test_update_noiseless():
    code = A.parity32()
    state = A.initial_state(code)
    new = A.update_posterior(state, code, 1, state_likelihoods(0.0, 0.5))
    for w, g in zip(code.words(), new.g):
        assert (g == 0.0) == (w[0] != "1")
    assert new.j == 2


def test_update_uniform_code_stays_uniform():
    code = A.uncoded(2)
    state = A.update_posterior(A.initial_state(code), code, 0, state_likelihoods(0.3, 0.5))
    # bit 1 is now informative, the other bit still uniform
    g = state.g.reshape(2, 2)
    assert np.allclose(g[:, 0], g[:, 1])


def test_update_parity_matches_oracle():
    code = A.parity32()
    s = A.bpsk_overlap(0.5)
    state = A.update_posterior(A.initial_state(code), code, 0, state_likelihoods(s, 0.5))
    assert np.allclose(state.g, oracle_mod.posterior(code.codewords, (0,), s), atol=1e-12)


def test_update_degenerate_and_bad_outcome():
    code = A.uncoded(1)
    lik = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(A.DegenerateEvidenceError):
        A.update_posterior(A.initial_state(code), code, 1, lik)
    with pytest.raises(ValueError):
        A.update_posterior(A.initial_state(code), code, 2, lik)


def test_helstrom_oracle_agrees_with_library_likelihood():
    for s in (0.05, 0.4, 0.9):
        for p1 in (0.1, 0.3, 0.7, 0.95):
            assert np.allclose(oracle_mod.helstrom_likelihood(s, p1), state_likelihoods(s, p1), atol=1e-12)


@pytest.mark.parametrize("code", [A.parity32(), A.hamming74()], ids=lambda c: c.name)
@pytest.mark.parametrize("E", [0.1, 0.5, 2.0])
def test_posterior_oracle_equivalence(code, E):
    s = A.bpsk_overlap(E)
    for prefix, _, state in A.posterior_tree(code, s):
        want = oracle_mod.posterior(code.codewords, prefix, s)
        assert np.max(np.abs(state.g - want)) <= 1e-12
        assert state.g.sum() == pytest.approx(1.0, abs=1e-12)


def test_run_exact_uncoded_factorizes():
    E = 0.3
    s = A.bpsk_overlap(E)
    cross = (1 - math.sqrt(1 - s)) / 2
    for mode in A.Mode:
        r = A.run_exact(A.uncoded(2), E, mode)
        for (x, y), p in r.as_dict().items():
            flips = sum(a != b for a, b in zip(x, y))
            assert p == pytest.approx(0.25 * cross**flips * (1 - cross) ** (2 - flips), abs=1e-15)


def test_run_exact_large_energy_concentrates():
    r = A.run_exact(A.parity32(), 12.0, "adaptive")
    diag = sum(p for (x, y), p in r.as_dict().items() if x == y)
    assert diag == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("mode", ["adaptive", "fixed"])
def test_run_exact_matches_summation_oracle(mode):
    code = A.parity32()
    r = A.run_exact(code, 1.0, mode)
    want = oracle_mod.joint(code.codewords, A.bpsk_overlap(1.0), adaptive=mode == "adaptive")
    assert np.allclose(r.joint, want, atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 10.0), st.sampled_from(["parity32", "hamming74", "uncoded:3"]), st.sampled_from(list(A.Mode)))
def test_joint_normalization(E, kind, mode):
    code = A.make_code(kind)
    r = A.run_exact(code, E, mode)
    assert r.joint.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(r.joint.sum(axis=1) * len(code), 1.0, atol=1e-10)
    m = A.metrics(r)
    assert -1e-12 <= m.mi <= code.k + 1e-12


def test_run_exact_errors():
    with pytest.raises(ValueError):
        A.run_exact(A.parity32(), 0.0)
    with pytest.raises(A.EnumerationLimitError):
        A.run_exact(A.uncoded(17), 1.0)


@given(st.floats(1e-3, 8.0))
def test_uncoded_single_mode_metrics(E):
    m = A.metrics(A.run_exact(A.uncoded(1), E))
    assert m.mi == pytest.approx(capacity_per_use(math.exp(-4 * E)), abs=1e-12)
    assert m.die == m.mi and m.pie == pytest.approx(m.mi / E)


def test_parity_high_energy_limits():
    m = A.metrics(A.run_exact(A.parity32(), 10.0, "adaptive"))
    assert m.mi == pytest.approx(2.0, abs=1e-3)
    assert m.die == pytest.approx(2 / 3, abs=1e-3)
    h = A.metrics(A.run_exact(A.hamming74(), 10.0, "adaptive"))
    assert h.mi == pytest.approx(4.0, abs=1e-3)


def test_low_energy_photon_efficiency():
    E = 1e-4
    for kind in ("uncoded:3", "parity32", "hamming74"):
        for mode in A.Mode:
            m = A.metrics(A.run_exact(A.make_code(kind), E, mode))
            assert m.pie == pytest.approx(2 * LOG2E, rel=0.02)


@pytest.mark.parametrize("kind", ["parity32", "hamming74"])
def test_adaptive_not_worse_than_fixed(kind):
    code = A.make_code(kind)
    for E in np.geomspace(1e-3, 10, 15):
        ad = A.metrics(A.run_exact(code, E, "adaptive")).mi
        fx = A.metrics(A.run_exact(code, E, "fixed")).mi
        assert ad >= fx - 1e-12


def test_adaptive_third_bit_error_lower():
    code = A.parity32()
    for E in np.geomspace(1e-3, 10, 50):
        ad = A.metrics(A.run_exact(code, E, "adaptive")).bit_error[2]
        fx = A.metrics(A.run_exact(code, E, "fixed")).bit_error[2]
        assert ad <= fx
        if 1.0 <= E <= 3.0:
            assert ad < fx - 1e-6
        if E >= 0.05:
            # relative margin stays visible even where both errors are tiny
            assert ad < 0.95 * fx


def test_first_bits_unaffected_by_adaptation():
    code = A.parity32()
    ad = A.metrics(A.run_exact(code, 0.7, "adaptive")).bit_error
    fx = A.metrics(A.run_exact(code, 0.7, "fixed")).bit_error
    assert ad[0] == pytest.approx(fx[0], abs=1e-15)
    assert ad[1] == pytest.approx(fx[1], abs=1e-15)


def test_coded_die_below_uncoded_at_high_energy():
    E = 3.0
    unc = A.metrics(A.run_exact(A.uncoded(3), E)).die
    for kind in ("parity32", "hamming74"):
        assert A.metrics(A.run_exact(A.make_code(kind), E)).die < unc
