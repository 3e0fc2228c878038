"""Hermitian operator utilities: eigendecomposition, spreads, kernels, Bloch maps.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``.
:func:`as_hermitian` is the single entry point that validates and
symmetrises user-supplied matrices; everything else assumes its output.
"""
from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import DimMismatchError, EigenConvergenceError, NotHermitianError, ValidationError

HERMITIAN_ATOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted descending; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_hermitian(a, atol=HERMITIAN_ATOL):
    """Return ``(a + a^dagger)/2`` as a complex array, rejecting non-Hermitian input.

    Raises
    ------
    ValidationError
        If ``a`` is not square or has non-finite entries.
    NotHermitianError
        If ``max |a - a^dagger| > atol``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    asym = np.abs(a - a.conj().T).max()
    if asym > atol:
        raise NotHermitianError(asym)
    return (a + a.conj().T) / 2


def eig_hermitian(a):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius norm falls below
    ``1e-13 * ||a||_F``; gives up after 100 sweeps. Eigenvalues come back in
    descending order, ties kept in the order the rotations left them.
    """
    a = np.asarray(a, dtype=np.complex128)
    w, v, sweeps, off = kernels.jacobi_eigh(a, JACOBI_TOL, JACOBI_MAX_SWEEPS, True)
    if sweeps < 0:
        raise EigenConvergenceError(off, JACOBI_MAX_SWEEPS)
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigvalsh(a):
    """Eigenvalues only, descending."""
    w, _, sweeps, off = kernels.jacobi_eigh(np.asarray(a, dtype=np.complex128), JACOBI_TOL, JACOBI_MAX_SWEEPS, False)
    if sweeps < 0:
        raise EigenConvergenceError(off, JACOBI_MAX_SWEEPS)
    return np.sort(w)[::-1]


def lambda_max(a):
    """Largest eigenvalue and a unit eigenvector for it.

    For a degenerate top eigenvalue the first listed eigenvector is returned;
    for the zero matrix that is the first basis vector.
    """
    dec = eig_hermitian(a)
    return float(dec.eigenvalues[0]), dec.eigenvectors[:, 0]


def lambda_min(a):
    dec = eig_hermitian(a)
    return float(dec.eigenvalues[-1]), dec.eigenvectors[:, -1]


def spread(a):
    """``lambda_max(a) - lambda_min(a)``."""
    w = eigvalsh(a)
    return float(w[0] - w[-1])


def default_kernel_tol(a):
    return 1e-9 * max(1.0, float(np.abs(a).max()))


def kernel_projector(a, tol=None):
    """Orthogonal projector onto the span of eigenvectors with ``|lambda| <= tol``.

    A full-rank input gives the zero projector, the zero matrix the identity.
    """
    a = np.asarray(a, dtype=np.complex128)
    if tol is None:
        tol = default_kernel_tol(a)
    dec = eig_hermitian(a)
    q = dec.eigenvectors[:, np.abs(dec.eigenvalues) <= tol]
    p = q @ q.conj().T
    return (p + p.conj().T) / 2


def projector(vec):
    """``|v><v|`` for a (not necessarily normalised) vector."""
    vec = np.asarray(vec, dtype=np.complex128)
    vec = vec / np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def bloch_to_state(v):
    """Qubit density operator ``(I + v.sigma)/2``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimMismatchError(f"Bloch vector must have 3 components, got shape {v.shape}")
    if np.linalg.norm(v) > 1 + 1e-12:
        raise ValidationError(f"Bloch vector norm {np.linalg.norm(v):.6g} exceeds 1")
    return (np.eye(2) + np.einsum("k,kxy->xy", v, PAULI)) / 2


def state_to_bloch(rho):
    """Bloch vector ``Tr(rho sigma_k)`` of a qubit operator (trace-normalised)."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise DimMismatchError(f"expected a 2x2 operator, got shape {rho.shape}")
    tr = np.trace(rho).real
    return np.einsum("kyx,xy->k", PAULI, rho).real / tr
