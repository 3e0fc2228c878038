"""The qubit SIC-POVM, its noisy version and closed-form reference values.

``E_i(eps) = (I + eps n_i . sigma) / 4`` with the four tetrahedral Bloch
directions ``n_i``; ``eps = 1`` is the ideal detector and ``eps = 0`` the
trivial one.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .capacity import GroupAction
from .errors import ValidationError
from .linalg import PAULI
from .povm import validate_povm

SQRT3 = np.sqrt(3.0)
SIC_BLOCH = np.array([[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]], dtype=float) / SQRT3
LN2 = np.log(2.0)


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    return epsilon


@dataclass(frozen=True, eq=False)
class NoisySicQubit:
    epsilon: float
    povm: object
    bloch_vectors: np.ndarray


def sic_elements(epsilon=1.0):
    epsilon = _check_epsilon(epsilon)
    return (np.eye(2) + epsilon * np.einsum("ik,kxy->ixy", SIC_BLOCH, PAULI)) / 4


def sic_qubit(epsilon=1.0):
    """The four-outcome qubit SIC detector mixed with white noise."""
    epsilon = _check_epsilon(epsilon)
    return NoisySicQubit(epsilon, validate_povm(sic_elements(epsilon)), SIC_BLOCH.copy())


def bloch_rotation(axis, angle):
    """SU(2) element rotating Bloch vectors by ``angle`` about ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * np.einsum("k,kxy->xy", axis, PAULI)


def _outcome_permutation(U, elements, atol=1e-9):
    perm = []
    for e in elements:
        image = U @ e @ U.conj().T
        hits = [k for k, f in enumerate(elements) if np.abs(image - f).max() < atol]
        if len(hits) != 1:
            raise ValidationError("rotation does not permute the SIC elements")
        perm.append(hits[0])
    return tuple(perm)


def tetrahedral_group():
    """The 12 rotations of the tetrahedron acting on the qubit SIC.

    Generated from a half-turn about ``x`` and a third-turn about ``n_1``,
    closed under multiplication and deduplicated by outcome permutation
    (the SU(2) sign is irrelevant for the action).
    """
    elements = sic_elements(1.0)
    gens = [bloch_rotation([1, 0, 0], np.pi), bloch_rotation(SIC_BLOCH[0], 2 * np.pi / 3)]
    found = {_outcome_permutation(np.eye(2), elements): np.eye(2, dtype=np.complex128)}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for U in frontier:
            for G in gens:
                V = G @ U
                p = _outcome_permutation(V, elements)
                if p not in found:
                    found[p] = V
                    nxt.append(V)
        frontier = nxt
    perms = sorted(found)
    identity = perms.index((0, 1, 2, 3))
    return GroupAction(
        unitaries=np.array([found[p] for p in perms]),
        conjugate=np.zeros(len(perms), dtype=bool),
        permutations=np.array(perms),
        identity=identity,
    )


def analytic_min_error(n, epsilon=1.0):
    """Minimum-error success probability for ``n`` equiprobable messages."""
    epsilon = _check_epsilon(epsilon)
    if n < 2:
        raise ValidationError(f"need at least two messages, got {n}")
    if n == 2:
        return 0.5 + epsilon / (2 * SQRT3)
    if n == 3:
        return 1 / 3 + epsilon * (1 + 1 / SQRT3) / 6
    return (1 + epsilon) / n


class RegionValues(NamedTuple):
    """Success probabilities of the competing groupings for three messages."""

    B: float
    C: float
    D: float
    trivial: float


def _region_matrix(epsilon):
    e = epsilon
    top = e * (1 + 1 / SQRT3) / 2 + (1 - e) / 2
    side = e / 2 + (1 - e) / 4
    return np.array([
        [top, side, side],
        [top, top, 0.0],
        [e + 3 * (1 - e) / 4, side, 0.0],
        [1.0, 0.0, 0.0],
    ])


def analytic_region_values(priors, epsilon=1.0):
    """Success probabilities of groupings B (2-1-1), C (2-2-0), D (3-1-0) and
    the trivial one, for priors ordered ``pi1 >= pi2 >= pi3``."""
    epsilon = _check_epsilon(epsilon)
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (3,):
        raise ValidationError("need three priors")
    return RegionValues(*(_region_matrix(epsilon) @ priors))


def analytic_triple_point(epsilon=1.0):
    """Priors ``(pi1, pi2)`` where groupings B, C and D succeed equally often."""
    R = _region_matrix(_check_epsilon(epsilon))
    A = np.array([R[0] - R[1], R[0] - R[2], np.ones(3)])
    pt = np.linalg.solve(A, [0.0, 0.0, 1.0])
    return float(pt[0]), float(pt[1])


def h_bits(t):
    """``eta((1 + t)/2)`` in bits, with ``eta(x) = -x log2 x`` and ``eta(0) = 0``."""
    x = (1 + np.asarray(t, dtype=float)) / 2
    return -xlogy(x, x) / LN2


def h_prime(t):
    x = (1 + np.asarray(t, dtype=float)) / 2
    return -(np.log(x) + 1) / (2 * LN2)


def analytic_capacity(epsilon=1.0):
    """Capacity in bits of the noisy qubit SIC, ``1 - [h(-eps) + 3 h(eps/3)] / 2``."""
    e = _check_epsilon(epsilon)
    lo, hi = (1 - e) / 4, (1 + e / 3) / 4
    return float(1 + (xlogy(lo, (1 - e) / 2) + 3 * xlogy(hi, (1 + e / 3) / 2)) / LN2)


def quadratic_minorant(epsilon):
    """Coefficients ``(a, b, c)`` of the quadratic touching ``h(eps t)`` at
    ``t = 1/3`` and meeting it at ``t = -1``."""
    e = _check_epsilon(epsilon)
    hm, h3, d3 = float(h_bits(-e)), float(h_bits(e / 3)), float(h_prime(e / 3))
    a = (hm + 15 * h3 - 4 * e * d3) / 16
    b = (-3 * hm + 3 * h3 + 4 * e * d3) / 8
    c = 3 * (3 * hm - 3 * h3 + 4 * e * d3) / 16
    return a, b, c


@dataclass
class InequalityReport:
    epsilon: float
    grid_points: int
    min_gap: float
    worst_t: float
    gap_at_third: float
    anchor_residuals: tuple
    gamma: float
    bound: float
    capacity: float
    passed: bool


def verify_capacity_inequality(epsilon, grid_points=10**4, atol=1e-12):
    """Check ``h(eps t) >= a + b t + c t^2`` on a grid of ``t`` in ``[-1, 1]``.

    Also checks the three tangency/contact conditions, that
    ``gamma = c + eps^2 / (4 ln 2)`` is non-positive, and that the resulting
    mutual-information bound equals :func:`analytic_capacity`. The grid always
    contains ``t = 1/3``, where the gap is zero.
    """
    e = _check_epsilon(epsilon)
    a, b, c = quadratic_minorant(e)
    t = np.union1d(np.linspace(-1.0, 1.0, grid_points), [1 / 3])
    gap = h_bits(e * t) - (a + b * t + c * t**2)
    k = int(np.argmin(gap))
    third = float(h_bits(e / 3) - (a + b / 3 + c / 9))
    anchors = (
        float(a - b + c - h_bits(-e)),
        third,
        float(b + 2 * c / 3 - e * h_prime(e / 3)),
    )
    gamma = c + e**2 / (4 * LN2)
    bound = 1 - (4 * a + 4 * c / 3) / 2
    cap = analytic_capacity(e)
    passed = bool(gap.min() >= -atol and max(map(abs, anchors)) <= 1e-12
                  and gamma <= atol and abs(bound - cap) <= 1e-12)
    return InequalityReport(e, len(t), float(gap[k]), float(t[k]), third, anchors, float(gamma), float(bound), cap, passed)
