import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measurescale.dominant_eigen import (
    DominantTriple,
    closed_form_principal_vector_d2,
    filter_principal_vector,
    power_limit_error,
    power_limit_errors,
    principal_right_vector,
    random_dominant_triple,
    rate_envelope_check,
)
from measurescale.errors import DegenerateSpectrumError, HypothesisError, MultiplicityError
from measurescale.filter_bank import FilterBank, classify_beta, slanted_matrix, taps_from_beta
from measurescale.fractal_scale import check_two_sided_hypotheses

from conftest import P_A0_03, SQ2, TAPS_03, V_03, V_NORM2_03

E0 = np.array([1.0, 0.0, 0.0])


def triple03():
    fb = taps_from_beta(0.3)
    return DominantTriple(slanted_matrix(fb.taps), fb.taps[0], E0)


def jordan_witness():
    F = np.array([[0.5, 1.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 2.0]])
    return DominantTriple(F, 2.0, np.array([0.0, 0.0, 1.0]))


# --- triples -----------------------------------------------------------------


def test_triple_validation():
    with pytest.raises(HypothesisError):
        DominantTriple(np.diag([2.0, 0.5]), 2.0, [1.0, 1.0])
    with pytest.raises(HypothesisError):
        DominantTriple(np.diag([2.0, 0.5]), 2.0, [0.0, 1.0])
    with pytest.raises(MultiplicityError):
        DominantTriple(np.diag([2.0, 2.0]), 2.0, [1.0, 0.0])
    with pytest.raises(HypothesisError):
        DominantTriple(np.diag([2.0, -2.0]), 2.0, [1.0, 0.0])
    with pytest.raises(HypothesisError):
        DominantTriple(np.diag([2.0, 0.5]), 2.0, [1.0])


# --- principal vector --------------------------------------------------------


def test_principal_vector_diagonal():
    t = DominantTriple(np.diag([2.0, 0.5]), 2.0, [1.0, 0.0])
    np.testing.assert_allclose(principal_right_vector(t).xi, [1, 0], atol=1e-15)


def test_principal_vector_lower_triangular():
    t = DominantTriple(np.array([[1.0, 0.0], [1.0, 0.5]]), 1.0, [1.0, 0.0])
    np.testing.assert_allclose(principal_right_vector(t).xi, [1, 2], atol=1e-14)


def test_principal_vector_beta03():
    xi = principal_right_vector(triple03()).xi
    np.testing.assert_allclose(xi, V_03, atol=1e-12)


def test_principal_vector_one_by_one():
    t = DominantTriple(np.array([[3.0j]]), 3.0j, [1.0])
    np.testing.assert_allclose(principal_right_vector(t).xi, [1.0])


def test_degenerate_compression_detected():
    # F* w = a w holds, but a reappears inside the compression (Jordan pair)
    F = np.array([[1.0, 0.0], [1.0, 1.0]])
    with pytest.raises((DegenerateSpectrumError, MultiplicityError)):
        principal_right_vector(DominantTriple(F, 1.0, [1.0, 0.0]))


def test_filter_principal_vector_beta03():
    v = filter_principal_vector(taps_from_beta(0.3))
    np.testing.assert_allclose(v, V_03, atol=1e-12)
    assert np.vdot(v, v).real == pytest.approx(V_NORM2_03, abs=1e-12)
    F0 = slanted_matrix(TAPS_03)
    np.testing.assert_allclose(F0 @ v, TAPS_03[0] * v, atol=1e-12)


def test_closed_form_matches_oracle():
    fb = taps_from_beta(0.3)
    a0, a1, a2, a3 = fb.taps.real
    p = a0 * a0 - (a1 + a2) * a0 + a1 * a2 - a0 * a3
    assert p == pytest.approx(P_A0_03, abs=1e-14)
    np.testing.assert_allclose(closed_form_principal_vector_d2(fb), V_03, atol=1e-12)
    with pytest.raises(ValueError):
        closed_form_principal_vector_d2(FilterBank([1 / SQ2, 1 / SQ2]))


def test_filter_principal_vector_zero_inhomogeneity():
    # a2 = 0 while hypotheses hold: v = e0
    fb = FilterBank([1 / SQ2, 0, 0, 1 / SQ2])
    F0 = slanted_matrix(fb.taps)
    # a0 = 1/sqrt2 is repeated here, so use a generic six-tap bank with a2 = a4 = 0
    with pytest.raises(MultiplicityError):
        filter_principal_vector(fb)
    t = DominantTriple(np.array([[0.9, 0, 0], [0, 0.3, 0.1], [0, 0.2, 0.4]]), 0.9, E0)
    np.testing.assert_allclose(principal_right_vector(t).xi, E0)
    assert F0[1, 0] == 0


def test_filter_principal_vector_hypothesis_errors(haar4):
    with pytest.raises(HypothesisError):
        filter_principal_vector(haar4)
    with pytest.raises(HypothesisError):
        filter_principal_vector(taps_from_beta(-0.3 - math.pi / 2))


BETAS_I = np.linspace(-math.pi / 4 + 0.02, math.pi / 4 - 0.02, 32)


@pytest.mark.parametrize("beta", BETAS_I)
def test_filter_vector_agrees_with_block_construction(beta):
    fb = taps_from_beta(beta)
    assert classify_beta(beta) == "i"
    v = filter_principal_vector(fb)
    t = DominantTriple(slanted_matrix(fb.taps), fb.taps[0], E0)
    np.testing.assert_allclose(principal_right_vector(t).xi, v, atol=1e-10)
    np.testing.assert_allclose(closed_form_principal_vector_d2(fb), v, atol=1e-10)
    assert np.vdot(v, v).real >= 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(-math.pi, math.pi))
def test_norm_of_v_at_least_one(beta):
    fb = taps_from_beta(beta)
    if not check_two_sided_hypotheses(fb).all_ok:
        return
    try:
        v = filter_principal_vector(fb)
    except MultiplicityError:
        return
    assert np.vdot(v, v).real >= 1.0 - 1e-12


@pytest.mark.parametrize("seed", range(100))
def test_random_triples_principal_vector(seed):
    rng = np.random.default_rng(seed)
    t = random_dominant_triple(rng, int(rng.integers(2, 9)))
    pv = principal_right_vector(t)
    assert abs(np.vdot(t.w, pv.xi) - 1) < 1e-10
    assert np.linalg.norm(t.F @ pv.xi - t.a * pv.xi) <= 1e-9 * abs(t.a) * np.linalg.norm(pv.xi)


@pytest.mark.parametrize("seed", range(10))
def test_uniqueness_perturbation(seed):
    rng = np.random.default_rng(1000 + seed)
    t = random_dominant_triple(rng, 5)
    xi = principal_right_vector(t).xi
    # direction orthogonal to the a-eigenvector xi
    z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    z -= np.vdot(xi, z) / np.vdot(xi, xi) * xi
    bumped = xi + 1e-3 * z / np.linalg.norm(z)
    assert np.linalg.norm(t.F @ bumped - t.a * bumped) > 1e-6


# --- power limits ------------------------------------------------------------


def test_power_error_diagonal_exact():
    t = DominantTriple(np.diag([2.0, 0.5]), 2.0, [1.0, 0.0])
    errs = power_limit_errors(t, [3.0, 4.0], 30)
    np.testing.assert_allclose(errs, 4.0 * 0.25 ** np.arange(31), rtol=1e-13)


def test_power_error_beta03():
    assert power_limit_error(triple03(), E0, 60) < 1e-4


def test_power_error_subdominant_eigenvector():
    rng = np.random.default_rng(5)
    t = random_dominant_triple(rng, 4)
    vals, vecs = np.linalg.eig(t.F)
    order = np.argsort(-np.abs(vals))
    s, x = vals[order[1]], vecs[:, order[1]]
    assert abs(np.vdot(t.w, x)) < 1e-10
    for n in (1, 7, 25):
        want = abs(s / t.a) ** n * np.linalg.norm(x)
        assert power_limit_error(t, x, n) == pytest.approx(want, rel=1e-8)


def test_power_error_no_overflow():
    t = DominantTriple(np.diag([1e-200, 1e-201]), 1e-200, [1.0, 0.0])
    errs = power_limit_errors(t, [1.0, 1.0], 50)
    np.testing.assert_allclose(errs, 0.1 ** np.arange(51), rtol=1e-12)
    t = DominantTriple(np.diag([1e200, 1e199]), 1e200, [1.0, 0.0])
    assert np.all(np.isfinite(power_limit_errors(t, [1.0, 1.0], 50)))


def test_power_error_complex_a():
    a = 1.5 * np.exp(0.9j)
    t = DominantTriple(np.diag([a, 0.3j]), a, [1.0, 0.0])
    errs = power_limit_errors(t, [1.0, 2.0], 20)
    np.testing.assert_allclose(errs, 2.0 * (0.2) ** np.arange(21), rtol=1e-12)


def test_power_error_zero_vector():
    assert power_limit_error(triple03(), np.zeros(3), 10) == 0.0


# --- rate envelope -----------------------------------------------------------


def test_envelope_diagonalizable_passes_without_polynomial():
    t = DominantTriple(np.diag([2.0, 0.5, -0.25]), 2.0, [1.0, 0.0, 0.0])
    assert rate_envelope_check(t, [1.0, 1.0, 1.0], 60, polynomial=False)[0]
    assert rate_envelope_check(t, [1.0, 1.0, 1.0], 60)[0]


def test_envelope_beta03_e2():
    ok, C = rate_envelope_check(triple03(), np.array([0.0, 0.0, 1.0]), 60)
    assert ok and C > 0


def test_jordan_witness_needs_polynomial_factor():
    t = jordan_witness()
    x = np.array([0.0, 1.0, 1.0])
    assert principal_right_vector(t).xi == pytest.approx(np.array([0, 0, 1]))
    assert rate_envelope_check(t, x, 60, polynomial=True)[0]
    assert not rate_envelope_check(t, x, 60, polynomial=False)[0]


@pytest.mark.parametrize("seed", range(100))
def test_random_triples_envelope(seed):
    rng = np.random.default_rng(seed)
    t = random_dominant_triple(rng, int(rng.integers(2, 9)))
    x = rng.standard_normal(t.dim) + 1j * rng.standard_normal(t.dim)
    ok, C = rate_envelope_check(t, x, 60)
    assert ok, C
