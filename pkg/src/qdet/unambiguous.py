"""Reverse unambiguous discrimination with a fixed detector.

Outcomes are grouped into ``N`` conclusive elements and one inconclusive
element. Message ``i`` must be encoded in the kernel of every other
conclusive element, so its best success rate for a grouping is the top
eigenvalue of its own element compressed to that kernel.

Labels are 0-based: ``0..N-1`` are conclusive and ``N`` is inconclusive.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _scan
from ._backend import kernels
from .bayes import check_priors
from .errors import InfeasibleError
from .linalg import eig_hermitian, projector
from .povm import ENUMERATION_CAP, check_grouping_cap, group_povm, grouping_at

KERNEL_REL_TOL = 1e-9
INFEASIBLE_MESSAGE = (
    "no grouping admits unambiguous identification; only the trivial "
    "measurement with every outcome inconclusive remains"
)


@dataclass
class UnambiguousSolution:
    """Optimal unambiguous strategy.

    ``slot_of[i]`` is the conclusive element used to identify message ``i``;
    ``score_vector`` lists the slot scores in descending order and
    ``p_success = sorted_priors . score_vector``. Messages in
    ``never_identified`` have a zero-probability conclusive element; their
    signal state is any vector compatible with the zero-error constraints.
    """

    grouping: tuple
    grouped_elements: np.ndarray
    inconclusive_element: np.ndarray
    kernels: np.ndarray
    signal_vectors: np.ndarray
    score_vector: np.ndarray
    slot_of: tuple
    priors: np.ndarray
    p_success: float
    never_identified: tuple
    feasible: bool = True
    index: int = field(repr=False, default=-1)

    @property
    def signal_states(self):
        return np.array([projector(v) for v in self.signal_vectors])

    def label_strings(self):
        n = len(self.priors)
        return tuple("?" if g == n else str(g + 1) for g in self.grouping)


class FeasibleGrouping(NamedTuple):
    grouping: tuple
    kernel_ranks: tuple


def _kernel_basis(op):
    dec = eig_hermitian(op)
    keep = np.abs(dec.eigenvalues) <= KERNEL_REL_TOL * max(1.0, float(np.abs(op).max()))
    return dec.eigenvectors[:, keep]


def _slot_data(grouped, n):
    """Kernel bases and compressed top eigenpairs for each conclusive slot."""
    bases, scores, vectors = [], [], []
    total = grouped[:n].sum(axis=0)
    for i in range(n):
        Q = _kernel_basis(total - grouped[i])
        bases.append(Q)
        if Q.shape[1] == 0:
            scores.append(-1.0)
            vectors.append(None)
            continue
        dec = eig_hermitian(Q.conj().T @ grouped[i] @ Q)
        scores.append(max(float(dec.eigenvalues[0]), 0.0))
        vec = Q @ dec.eigenvectors[:, 0]
        vectors.append(vec / np.linalg.norm(vec))
    return bases, np.array(scores), vectors


def _gain_fn(priors_desc):
    def gain_of(scores):
        feasible = scores.min(axis=1) >= 0
        g = -np.sort(-scores, axis=1) @ priors_desc
        # a grouping that can never give a conclusive answer is the trivial one
        return np.where(feasible & (g > _scan.TIE_TOL), g, -np.inf)

    return gain_of


def solve_unambiguous(povm, priors, cap=ENUMERATION_CAP):
    """Exact optimum of reverse unambiguous discrimination.

    Scores are sorted in descending order and matched with the priors sorted
    the same way, so any prior order is accepted; ``slot_of`` reports the
    resulting message-to-element pairing.

    Raises
    ------
    InfeasibleError
        If every grouping leaves some kernel trivial or never gives a
        conclusive answer.
    CapExceededError
        If ``(N + 1)**M`` exceeds ``cap``.
    """
    priors = check_priors(priors)
    n = len(priors)
    M = povm.num_outcomes
    total = check_grouping_cap(M, n + 1, cap)
    E = np.ascontiguousarray(povm.elements)
    order = np.argsort(-priors, kind="stable")

    index, _, _ = _scan.first_best(
        total,
        lambda a, b: kernels.unambiguous_scores(E, n, a, b, KERNEL_REL_TOL),
        _gain_fn(priors[order]),
    )
    if index is None:
        raise InfeasibleError(INFEASIBLE_MESSAGE)

    assignment = grouping_at(index, M, n + 1)
    grouped = group_povm(povm, assignment, n + 1).elements
    bases, slot_scores, slot_vecs = _slot_data(grouped, n)
    slot_rank = np.argsort(-slot_scores, kind="stable")
    slot_of = [0] * n
    for msg, slot in zip(order, slot_rank):
        slot_of[msg] = int(slot)
    kernels_ = np.array([Q @ Q.conj().T for Q in bases])
    vectors = np.array([slot_vecs[s] for s in slot_of])
    score_vector = slot_scores[slot_rank]
    never = tuple(i for i in range(n) if slot_scores[slot_of[i]] <= _scan.TIE_TOL)
    return UnambiguousSolution(
        grouping=assignment,
        grouped_elements=grouped[:n],
        inconclusive_element=grouped[n],
        kernels=kernels_,
        signal_vectors=vectors,
        score_vector=score_vector,
        slot_of=tuple(slot_of),
        priors=priors,
        p_success=float(priors[order] @ score_vector),
        never_identified=never,
        index=index,
    )


def feasible_groupings(povm, n, cap=ENUMERATION_CAP):
    """Groupings whose ``n`` kernels are all nontrivial, with the kernel ranks.

    The grouping that sends every outcome to the inconclusive label is left
    out, since it never identifies anything.
    """
    M = povm.num_outcomes
    total = check_grouping_cap(M, n + 1, cap)
    E = np.ascontiguousarray(povm.elements)
    out = []
    for a, b in _scan.chunks(total):
        s = kernels.unambiguous_scores(E, n, a, b, KERNEL_REL_TOL)
        for k in np.flatnonzero(s.min(axis=1) >= 0):
            idx = a + int(k)
            if idx == total - 1:
                continue
            g = grouping_at(idx, M, n + 1)
            grouped = group_povm(povm, g, n + 1).elements
            conclusive = grouped[:n].sum(axis=0)
            ranks = tuple(_kernel_basis(conclusive - grouped[i]).shape[1] for i in range(n))
            out.append(FeasibleGrouping(g, ranks))
    return out
