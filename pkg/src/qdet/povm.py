"""POVMs, signal ensembles, outcome groupings and Born-rule joint distributions."""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    CapExceededError,
    DimMismatchError,
    InvalidEnsembleError,
    NotCompleteError,
    NotPositiveError,
    ValidationError,
)
from .linalg import as_hermitian, eigvalsh

POSITIVITY_TOL = 1e-9
COMPLETENESS_TOL = 1e-8
PROB_CLAMP = 1e-12
ENUMERATION_CAP = 10**7


@dataclass(frozen=True, eq=False)
class Povm:
    """A validated detector: ``elements`` has shape ``(M, d, d)`` and sums to I."""

    elements: np.ndarray

    @property
    def dim(self):
        return self.elements.shape[1]

    @property
    def num_outcomes(self):
        return self.elements.shape[0]

    def __len__(self):
        return self.num_outcomes

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, j):
        return self.elements[j]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Signal encoding ``{priors[i], states[i]}``; states have shape ``(N, d, d)``."""

    priors: np.ndarray
    states: np.ndarray

    @property
    def dim(self):
        return self.states.shape[1]

    def __len__(self):
        return len(self.priors)


def validate_povm(elements):
    """Check positivity and completeness and return a :class:`Povm`.

    Elements are Hermitised on the way in. Indices in error messages are
    1-based, matching how outcomes are usually numbered.

    Raises
    ------
    DimMismatchError, NotPositiveError, NotCompleteError
    """
    elements = list(elements)
    if not elements:
        raise ValidationError("a POVM needs at least one element")
    shapes = {np.shape(e) for e in elements}
    if len(shapes) != 1:
        raise DimMismatchError(f"POVM elements have differing shapes {sorted(shapes)}")
    ops = np.array([as_hermitian(e) for e in elements])
    for j, e in enumerate(ops):
        lo = eigvalsh(e)[-1]
        if lo < -POSITIVITY_TOL:
            raise NotPositiveError(j + 1, lo)
    residual = np.abs(ops.sum(axis=0) - np.eye(ops.shape[1])).max()
    if residual > COMPLETENESS_TOL:
        raise NotCompleteError(residual)
    ops.setflags(write=False)
    return Povm(ops)


def make_ensemble(priors, states):
    """Validate and build an :class:`Ensemble`.

    ``states`` may be density matrices ``(N, d, d)`` or state vectors ``(N, d)``.
    """
    priors = np.asarray(priors, dtype=float).ravel()
    states = np.asarray(states, dtype=np.complex128)
    if states.ndim == 2:
        norms = np.linalg.norm(states, axis=1, keepdims=True)
        vecs = states / norms
        states = np.einsum("ix,iy->ixy", vecs, vecs.conj())
    if states.ndim != 3 or states.shape[1] != states.shape[2]:
        raise DimMismatchError(f"states must be (N, d, d) or (N, d), got {states.shape}")
    if len(priors) != len(states):
        raise DimMismatchError(f"{len(priors)} priors for {len(states)} states")
    if np.any(priors <= 0):
        raise InvalidEnsembleError("priors must be strictly positive")
    if abs(priors.sum() - 1) > 1e-12:
        raise InvalidEnsembleError(f"priors sum to {priors.sum():.15g}, not 1")
    rhos = np.array([as_hermitian(r) for r in states])
    for i, r in enumerate(rhos):
        if abs(np.trace(r).real - 1) > 1e-10:
            raise InvalidEnsembleError(f"state {i + 1} has trace {np.trace(r).real:.12g}")
        if eigvalsh(r)[-1] < -POSITIVITY_TOL:
            raise InvalidEnsembleError(f"state {i + 1} is not positive semidefinite")
    priors.setflags(write=False)
    rhos.setflags(write=False)
    return Ensemble(priors, rhos)


def born_matrix(ensemble, povm):
    """Joint distribution ``P[i, j] = pi_i Tr(rho_i E_j)``.

    Values in ``[-1e-12, 0)`` are rounding and clamp to zero; anything more
    negative means the inputs were not a state and a POVM.
    """
    if ensemble.dim != povm.dim:
        raise DimMismatchError(f"ensemble dimension {ensemble.dim} != POVM dimension {povm.dim}")
    P = np.einsum("i,ixy,jyx->ij", ensemble.priors, ensemble.states, povm.elements).real
    if P.min() < -PROB_CLAMP:
        raise ValidationError(f"negative Born probability {P.min():.3g}")
    return np.maximum(P, 0.0)


def check_cap(count, cap=ENUMERATION_CAP, what="groupings", formula=None):
    if count > cap:
        raise CapExceededError(count, cap, what, formula)


def check_grouping_cap(M, L, cap=ENUMERATION_CAP):
    """Raise unless the ``L**M`` groupings of ``M`` outcomes fit in ``cap``."""
    total = L**M
    check_cap(total, cap, formula=f"{L}^{M}")
    return total


def num_groupings(M, L):
    return L**M


def enumerate_groupings(M, L, cap=ENUMERATION_CAP):
    """Yield every assignment of ``M`` outcomes to labels ``0..L-1``.

    Order is lexicographic over the assignment tuples, so the index of a
    grouping in this iterator equals its base-``L`` value with outcome 0 as
    the most significant digit.
    """
    check_grouping_cap(M, L, cap)
    return product(range(L), repeat=M)


def grouping_at(index, M, L):
    """The assignment tuple at position ``index`` of :func:`enumerate_groupings`."""
    digits = []
    for _ in range(M):
        index, r = divmod(index, L)
        digits.append(r)
    return tuple(reversed(digits))


def group_povm(povm, grouping, num_labels=None):
    """Coarse-grain a POVM: ``E~_j = sum of E_k with grouping[k] == j``.

    Empty groups give zero operators, so the result always has
    ``num_labels`` elements (default ``max(grouping) + 1``) and stays complete.
    """
    grouping = np.asarray(grouping, dtype=int)
    if grouping.shape != (povm.num_outcomes,):
        raise DimMismatchError(f"grouping has {grouping.size} labels for {povm.num_outcomes} outcomes")
    if num_labels is None:
        num_labels = int(grouping.max()) + 1
    if grouping.min() < 0 or grouping.max() >= num_labels:
        raise ValidationError(f"grouping labels must lie in 0..{num_labels - 1}")
    onehot = np.zeros((num_labels, povm.num_outcomes))
    onehot[grouping, np.arange(povm.num_outcomes)] = 1.0
    grouped = np.einsum("jk,kxy->jxy", onehot, povm.elements)
    grouped.setflags(write=False)
    return Povm(grouped)
