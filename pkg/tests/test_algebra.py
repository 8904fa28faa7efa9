import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from realdirac.algebra import (
    METRIC,
    EtaSet,
    build_eta_set,
    build_s_map,
    clifford_residual,
    dirac_gammas,
    s_decode,
    s_encode,
)
from realdirac.exceptions import ConjugacyViolation, NonRealResult

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
spinors = st.tuples(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite)).map(
    lambda p: p[0] + 1j * p[1])


def test_eta_squares(eta):
    assert np.array_equal(eta[0] @ eta[0], np.eye(8))
    for i in (1, 2, 3):
        assert np.array_equal(eta[i] @ eta[i], -np.eye(8))
    assert np.array_equal(eta[1] @ eta[2] + eta[2] @ eta[1], np.zeros((8, 8)))


def test_all_anticommutators_exhaustive(eta):
    worst = 0.0
    for a in range(4):
        for b in range(4):
            anti = eta[a] @ eta[b] + eta[b] @ eta[a]
            worst = max(worst, np.max(np.abs(anti - 2 * METRIC[a, b] * np.eye(8))))
    assert worst <= 1e-14


def test_complex_structure(eta):
    assert np.array_equal(eta.J @ eta.J, -np.eye(8))
    for a in range(4):
        assert np.max(np.abs(eta.J @ eta[a] - eta[a] @ eta.J)) <= 1e-14


def test_eta_is_real_form_of_gammas(eta, smap):
    # eta^a acting on Phi must match gamma^a acting on phi_a
    rng = np.random.default_rng(3)
    phi = rng.normal(size=8)
    for a, g in enumerate(dirac_gammas()):
        assert np.allclose(s_decode(eta[a] @ phi, smap), g @ s_decode(phi, smap), atol=1e-14)


def test_build_is_deterministic():
    a, b = build_eta_set(), build_eta_set()
    assert np.array_equal(a.eta, b.eta) and np.array_equal(a.J, b.J)


def test_clifford_residual_examples(eta):
    assert clifford_residual(eta) <= 1e-14
    doubled = EtaSet(np.concatenate([2 * eta.eta[:1], eta.eta[1:]]), eta.J)
    # {2 eta0, 2 eta0} = 8 I against 2 I
    assert clifford_residual(doubled) == pytest.approx(6.0)
    assert clifford_residual(doubled) >= 3
    assert clifford_residual(np.zeros((4, 8, 8))) == 2.0


def test_encode_zero(smap):
    assert np.array_equal(s_encode(np.zeros(4), smap), np.zeros(8))


def test_encode_i_phi_is_J_phi(eta, smap):
    rng = np.random.default_rng(0)
    phi = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert np.max(np.abs(s_encode(1j * phi, smap) - eta.J @ s_encode(phi, smap))) <= 1e-13


def test_round_trip_basis_vector(smap):
    e0 = np.array([1, 0, 0, 0], dtype=complex)
    assert np.allclose(s_decode(s_encode(e0, smap), smap), e0, atol=1e-15)


def test_round_trip_100_seeds(smap):
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        worst = max(worst, np.max(np.abs(s_decode(s_encode(phi, smap), smap) - phi)))
    assert worst <= 1e-13


def test_s_matrix_invertible_and_real_round_trip(smap):
    s = smap.complex_matrix
    assert abs(np.linalg.det(s)) > 1e-6
    rng = np.random.default_rng(5)
    phi = rng.normal(size=(20, 8))
    assert np.max(np.abs(s_encode(s_decode(phi, smap), smap) - phi)) <= 1e-14


def test_decoded_pair_satisfies_conjugacy(smap):
    rng = np.random.default_rng(7)
    phi = rng.normal(size=8)
    pair = smap.complex_matrix @ phi
    assert np.max(np.abs(pair[4:] - smap.n_b @ pair[:4].conj())) <= 1e-14


def test_complex_input_off_physical_subspace(smap):
    with pytest.raises(ConjugacyViolation):
        s_decode(1j * np.eye(8)[0], smap)


def test_inconsistent_map_gives_nonreal(smap):
    class Broken:
        n_b = smap.n_b
        inverse = np.eye(8, dtype=complex)

    with pytest.raises(NonRealResult):
        s_encode(np.array([1j, 0, 0, 0]), Broken)


@settings(max_examples=200, deadline=None)
@given(spinors)
def test_round_trip_property(phi):
    smap = build_s_map()
    scale = max(1.0, np.max(np.abs(phi)))
    assert np.max(np.abs(s_decode(s_encode(phi, smap), smap) - phi)) <= 1e-13 * scale


@settings(max_examples=200, deadline=None)
@given(spinors)
def test_equivariance_property(phi):
    smap, eta = build_s_map(), build_eta_set()
    scale = max(1.0, np.max(np.abs(phi)))
    diff = s_encode(1j * phi, smap) - eta.J @ s_encode(phi, smap)
    assert np.max(np.abs(diff)) <= 1e-13 * scale
