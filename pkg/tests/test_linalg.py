import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import power_iteration_top, random_hermitian
from qdet.errors import DimMismatchError, NotHermitianError, ValidationError
from qdet.linalg import (
    PAULI,
    as_hermitian,
    bloch_to_state,
    eig_hermitian,
    eigvalsh,
    kernel_projector,
    lambda_max,
    lambda_min,
    projector,
    spread,
    state_to_bloch,
)
from qdet.sic import SIC_BLOCH, sic_elements


def test_identity_eigenvalues(backend):
    dec = eig_hermitian(np.eye(2))
    np.testing.assert_allclose(dec.eigenvalues, [1, 1])


def test_diagonal_eigenpairs(backend):
    dec = eig_hermitian(np.diag([3.0, -1.0]))
    np.testing.assert_allclose(dec.eigenvalues, [3, -1])
    np.testing.assert_allclose(np.abs(dec.eigenvectors), np.eye(2), atol=1e-14)


def test_sic_element_spectrum(backend):
    np.testing.assert_allclose(eigvalsh(sic_elements(1.0)[0]), [0.5, 0.0], atol=1e-15)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_reconstruction_and_orthonormality(backend, d, rng):
    a = random_hermitian(d, rng)
    dec = eig_hermitian(a)
    v, w = dec.eigenvectors, dec.eigenvalues
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-12)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_eigenpairs_property(d, seed):
    a = random_hermitian(d, np.random.default_rng(seed))
    dec = eig_hermitian(a)
    resid = a @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues
    assert np.abs(resid).max() < 1e-11 * max(1.0, np.abs(a).max())


def test_lambda_max_of_paired_sic_elements():
    E = sic_elements(1.0)
    lam, vec = lambda_max(E[0] + E[1])
    assert lam == pytest.approx((1 + 1 / np.sqrt(3)) / 2, abs=1e-14)
    assert np.vdot(vec, (E[0] + E[1]) @ vec).real == pytest.approx(lam, abs=1e-14)


def test_lambda_max_zero_matrix_convention():
    lam, vec = lambda_max(np.zeros((3, 3)))
    assert lam == 0.0
    np.testing.assert_allclose(vec, [1, 0, 0])


def test_lambda_max_matches_power_iteration(rng):
    a = random_hermitian(3, rng)
    assert lambda_max(a)[0] == pytest.approx(power_iteration_top(a), abs=1e-8)
    assert lambda_min(a)[0] == pytest.approx(-power_iteration_top(-a), abs=1e-8)


@pytest.mark.parametrize(
    "a, expected",
    [(np.eye(2), 0.0), (np.diag([0.9, 0.1, 0.5]), 0.8), (sic_elements(1.0)[:2].sum(axis=0), 1 / np.sqrt(3))],
)
def test_spread(a, expected):
    assert spread(a) == pytest.approx(expected, abs=1e-14)


def test_kernel_projector_cases(rng):
    np.testing.assert_allclose(kernel_projector(np.zeros((2, 2))), np.eye(2))
    np.testing.assert_allclose(kernel_projector(sic_elements(1.0)[2]), bloch_to_state(-SIC_BLOCH[2]), atol=1e-12)
    x = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    a = x @ x.conj().T
    p = kernel_projector(a)
    assert np.trace(p).real == pytest.approx(2)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    assert np.abs(p @ a @ p).max() < 1e-12
    np.testing.assert_allclose(kernel_projector(np.eye(3)), np.zeros((3, 3)))


def test_bloch_round_trip(rng):
    np.testing.assert_allclose(bloch_to_state([0, 0, 1]), np.diag([1, 0]))
    np.testing.assert_allclose(bloch_to_state([0, 0, 0]), np.eye(2) / 2)
    rho = bloch_to_state(SIC_BLOCH[0])
    assert np.trace(rho @ sic_elements(1.0)[0]).real == pytest.approx(0.5)
    assert np.trace(rho @ rho).real == pytest.approx(1.0)
    v = rng.standard_normal(3)
    v *= 0.9 / np.linalg.norm(v)
    np.testing.assert_allclose(state_to_bloch(bloch_to_state(v)), v, atol=1e-14)


def test_projector_normalises():
    np.testing.assert_allclose(projector([2, 0]), np.diag([1, 0]))


def test_validation_errors():
    with pytest.raises(NotHermitianError):
        as_hermitian([[0, 1], [0, 0]])
    with pytest.raises(ValidationError):
        as_hermitian(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        as_hermitian([[np.nan, 0], [0, 1]])
    with pytest.raises(ValidationError):
        bloch_to_state([1, 1, 0])
    with pytest.raises(DimMismatchError):
        bloch_to_state([1, 0])
    with pytest.raises(DimMismatchError):
        state_to_bloch(np.eye(3))


def test_pauli_algebra():
    for k in range(3):
        np.testing.assert_allclose(PAULI[k] @ PAULI[k], np.eye(2))
    np.testing.assert_allclose(PAULI[0] @ PAULI[1], 1j * PAULI[2])
