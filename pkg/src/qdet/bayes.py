"""Reverse Bayes-cost discrimination with a fixed detector.

The receiver may only coarse-grain the detector's outcomes; the sender picks
the signal states. Deterministic groupings suffice, and for a fixed grouping
each message is best encoded in the top eigenvector of its weighted operator
``sum_j B[i, j] E~_j``. The optimum is therefore an exact finite search over
all ``L**M`` groupings.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import _scan
from ._backend import kernels
from .errors import CapExceededError, DimMismatchError, ValidationError
from .linalg import eigvalsh, lambda_max, projector
from .povm import ENUMERATION_CAP, check_grouping_cap, group_povm, grouping_at

REGION_CELL_CAP = 10**6


def check_priors(priors, n=None):
    priors = np.asarray(priors, dtype=float).ravel()
    if n is not None and len(priors) != n:
        raise DimMismatchError(f"expected {n} priors, got {len(priors)}")
    if len(priors) == 0 or np.any(priors <= 0) or not np.all(np.isfinite(priors)):
        raise ValidationError("priors must be finite and strictly positive")
    if abs(priors.sum() - 1) > 1e-9:
        raise ValidationError(f"priors sum to {priors.sum():.12g}, not 1")
    return priors / priors.sum()


def min_error_cost(n):
    """The 0/1 cost ``C[i, j] = 1 - delta_ij``."""
    return 1.0 - np.eye(n)


def normalize_cost(cost):
    """Affinely map a cost matrix into ``[0, 1]`` and return the gain matrix.

    Returns ``(gain, scale, offset)`` with ``cost = offset + scale * (1 - gain)``
    entrywise; because joint probabilities sum to one the same relation holds
    for the expected cost.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.size == 0:
        raise ValidationError(f"cost must be a non-empty matrix, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)) or cost.min() < 0:
        raise ValidationError("cost entries must be finite and non-negative")
    lo, hi = cost.min(), cost.max()
    scale = hi - lo if hi > lo else 1.0
    return 1.0 - (cost - lo) / scale, scale, lo


@dataclass
class BayesSolution:
    """Optimal grouping, encoding and performance for a Bayes-cost task.

    ``grouping[k]`` is the (0-based) hypothesis that outcome ``k`` is mapped
    to. ``gain`` is the normalised figure of merit ``B(P)``; for the 0/1 cost
    it is the success probability. ``original_cost`` is the expected cost on
    the caller's scale.
    """

    grouping: tuple
    grouped_elements: np.ndarray
    signal_vectors: np.ndarray
    score_vector: np.ndarray
    per_message_operators: np.ndarray
    priors: np.ndarray
    gain: float
    original_cost: float
    index: int = field(repr=False, default=-1)

    @property
    def signal_states(self):
        return np.array([projector(v) for v in self.signal_vectors])


def _scores_fn(povm, gain_matrix):
    E = np.ascontiguousarray(povm.elements)
    B = np.ascontiguousarray(gain_matrix, dtype=float)
    return lambda start, stop: kernels.grouping_scores(E, B, start, stop)


def solve_bayes(povm, priors, cost=None, cap=ENUMERATION_CAP):
    """Exact optimum of the reverse Bayes-cost problem.

    Parameters
    ----------
    povm : Povm
    priors : array_like, shape (N,)
    cost : array_like, shape (N, L), optional
        ``cost[i, j]`` is the cost of deciding hypothesis ``j`` when message
        ``i`` was sent. Defaults to the minimum-error cost.
    cap : int
        Largest number of groupings ``L**M`` to enumerate.

    Returns
    -------
    BayesSolution
    """
    priors = check_priors(priors)
    n = len(priors)
    if cost is None:
        cost = min_error_cost(n)
    gain_matrix, scale, offset = normalize_cost(cost)
    if gain_matrix.shape[0] != n:
        raise DimMismatchError(f"cost has {gain_matrix.shape[0]} rows for {n} priors")
    labels = gain_matrix.shape[1]
    total = check_grouping_cap(povm.num_outcomes, labels, cap)

    index, _, _ = _scan.first_best(total, _scores_fn(povm, gain_matrix), lambda s: s @ priors)
    return _bayes_solution(povm, priors, gain_matrix, scale, offset, index)


def _bayes_solution(povm, priors, gain_matrix, scale, offset, index):
    labels = gain_matrix.shape[1]
    assignment = grouping_at(index, povm.num_outcomes, labels)
    grouped = group_povm(povm, assignment, labels).elements
    ops = np.einsum("ij,jxy->ixy", gain_matrix, grouped)
    scores, vectors = [], []
    for op in ops:
        lam, vec = lambda_max(op)
        scores.append(lam)
        vectors.append(vec)
    scores = np.array(scores)
    gain = float(priors @ scores)
    return BayesSolution(
        grouping=assignment,
        grouped_elements=grouped,
        signal_vectors=np.array(vectors),
        score_vector=scores,
        per_message_operators=ops,
        priors=priors,
        gain=gain,
        original_cost=float(offset + scale * (1.0 - gain)),
        index=index,
    )


def min_error(povm, priors, cap=ENUMERATION_CAP):
    """Minimum-error reverse discrimination; ``gain`` is the success probability."""
    return solve_bayes(povm, priors, None, cap)


def binary_success(povm, priors, cap=ENUMERATION_CAP):
    """Two-message success probability from the closed form

    ``max over subsets of pi_1 lambda_max(E~) + pi_2 (1 - lambda_min(E~))``,

    where ``E~`` is the sum of the outcomes assigned to message 1.

    Returns
    -------
    (float, tuple)
        The success probability and the winning grouping (0 = message 1).
    """
    p1, p2 = check_priors(priors, 2)
    M = povm.num_outcomes
    total = check_grouping_cap(M, 2, cap)
    E = povm.elements

    def score_chunk(start, stop):
        idx = np.arange(start, stop, dtype=np.int64)
        to_first = ((idx[:, None] >> np.arange(M - 1, -1, -1)) & 1) == 0
        stack = np.einsum("gm,mxy->gxy", to_first.astype(float), E)
        w = kernels.eigvalsh_batch(stack)
        return np.stack([w[:, -1], w[:, 0]], axis=1)

    index, p, _ = _scan.first_best(total, score_chunk, lambda s: p1 * s[:, 0] + p2 * (1 - s[:, 1]))
    return float(p), grouping_at(index, M, 2)


def trivial_threshold(effect, atol=1e-9):
    """Prior of message 1 above which the trivial grouping ``{I, 0}`` beats ``{E, I - E}``.

    Returns 1 when ``lambda_max(E) = 1``: the measurement then always helps.
    """
    w = eigvalsh(effect)
    if w[-1] < -atol or w[0] > 1 + atol:
        raise ValidationError(f"effect must satisfy 0 <= E <= I; eigenvalues span [{w[-1]:.6g}, {w[0]:.6g}]")
    lo, hi = np.clip(w[-1], 0, 1), np.clip(w[0], 0, 1)
    if 1 - hi <= atol:
        return 1.0
    return float((1 - lo) / ((1 - lo) + (1 - hi)))


# ---------------------------------------------------------------------------
# prior-simplex region maps (three messages)


@dataclass
class Junction:
    """A point of the prior simplex where three optimality regions meet.

    ``grid_point`` is the centre of the cluster of grid nodes that flagged
    the junction. When ``verified`` is set, ``point`` is the exact prior at
    which the three regions' winning groupings tie and no other grouping
    does better; otherwise it repeats ``grid_point``.
    """

    point: tuple
    grid_point: tuple
    region_ids: tuple
    verified: bool
    groupings: dict
    score_vectors: dict = field(repr=False, default_factory=dict)

    def refined(self, region_ids=None):
        """Solve ``pi . s_a = pi . s_b = pi . s_c`` for three of the regions.

        Defaults to the first three ids. Returns None when the system is
        singular.
        """
        ids = tuple(region_ids or self.region_ids[:3])
        if len(ids) != 3:
            return None
        return _equal_gain_point([self.score_vectors[r] for r in ids])


def _equal_gain_point(score_vectors):
    s = [np.asarray(v, dtype=float) for v in score_vectors]
    A = np.array([s[0] - s[1], s[0] - s[2], np.ones(3)])
    try:
        pt = np.linalg.solve(A, [0.0, 0.0, 1.0])
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(pt)):
        return None
    return tuple(float(x) for x in pt)


@dataclass
class RegionMap:
    """Optimal grouping over a triangular grid of the three-message prior simplex."""

    resolution: float
    priors: np.ndarray
    grouping_ids: list
    gains: np.ndarray
    assignments: np.ndarray
    junctions: list

    def __len__(self):
        return len(self.gains)

    def cells(self):
        for p, gid, g in zip(self.priors, self.grouping_ids, self.gains):
            yield float(p[0]), float(p[1]), float(p[2]), gid, float(g)

    def write_csv(self, fh):
        fh.write("pi1,pi2,pi3,grouping_id,gain\n")
        for p1, p2, p3, gid, g in self.cells():
            fh.write(f"{p1!r},{p2!r},{p3!r},{gid},{g!r}\n")

    def refined_junctions(self):
        return [j.refined() for j in self.junctions]


def grouping_signature(assignment, priors, labels):
    """Block sizes per hypothesis, listed by decreasing prior.

    Relabelling messages together with their blocks leaves the signature
    unchanged, so symmetric copies of a region share one id. Equal priors are
    ordered by larger block first.
    """
    sizes = np.bincount(np.asarray(assignment), minlength=labels)
    if labels == len(priors):
        order = sorted(range(labels), key=lambda i: (-round(priors[i], 12), -sizes[i], i))
        sizes = sizes[order]
    return "-".join(str(int(s)) for s in sizes)


def map_regions(povm, resolution, cost=None, ordered=False, cell_cap=REGION_CELL_CAP, cap=ENUMERATION_CAP):
    """Optimal grouping and gain on every node of a triangular prior grid.

    With ``ordered=True`` only nodes with ``pi1 >= pi2 >= pi3`` are kept, but
    junctions are still detected on the full grid so regions touching the
    ordering boundary are resolved.
    """
    n = int(round(1.0 / resolution))
    if n < 1:
        raise ValidationError(f"resolution {resolution} too coarse")
    ncells = (n + 1) * (n + 2) // 2
    if ncells > cell_cap:
        raise CapExceededError(ncells, cell_cap, "grid cells")
    if cost is None:
        cost = min_error_cost(3)
    gain_matrix, _, _ = normalize_cost(cost)
    if gain_matrix.shape[0] != 3:
        raise DimMismatchError("region maps need exactly three messages")
    labels = gain_matrix.shape[1]
    total = check_grouping_cap(povm.num_outcomes, labels, cap)
    score_chunk = _scores_fn(povm, gain_matrix)
    S = np.concatenate([score_chunk(a, b) for a, b in _scan.chunks(total)])

    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    valid = ii + jj <= n
    ii, jj = ii[valid], jj[valid]
    kk = n - ii - jj
    P = np.stack([ii, jj, kk], axis=1) / n

    win = np.empty(len(P), dtype=np.int64)
    gains = np.empty(len(P))
    for a, b in _scan.chunks(len(P), 8192):
        G = P[a:b] @ S.T
        m = G.max(axis=1)
        first = np.argmax(G >= (m - _scan.TIE_TOL)[:, None], axis=1)
        win[a:b] = first
        gains[a:b] = G[np.arange(b - a), first]

    M = povm.num_outcomes
    uniq_win, win_inv = np.unique(win, return_inverse=True)
    assignments = np.array([grouping_at(int(w), M, labels) for w in uniq_win])[win_inv]
    # the id depends only on the winner and on how the priors are ordered
    order = np.argsort(-P, axis=1, kind="stable")
    sorted_p = np.take_along_axis(P, order, axis=1)
    ties = np.isclose(sorted_p[:, :-1], sorted_p[:, 1:], rtol=0, atol=1e-12)
    pattern = (order[:, 0] * 3 + order[:, 1]) * 4 + ties[:, 0] * 2 + ties[:, 1]
    uniq_key, rep, key_inv = np.unique(win * 64 + pattern, return_index=True, return_inverse=True)
    key_ids = [grouping_signature(assignments[r], P[r], labels) for r in rep]
    ids = [key_ids[k] for k in key_inv]

    code_of = {}
    key_codes = np.array([code_of.setdefault(g, len(code_of)) for g in key_ids])
    grid = -np.ones((n + 1, n + 1), dtype=np.int64)
    grid[ii, jj] = key_codes[key_inv]
    wgrid = -np.ones((n + 1, n + 1), dtype=np.int64)
    wgrid[ii, jj] = win
    name_of = {int(c): g for g, c in code_of.items()}
    junctions = _find_junctions(grid, wgrid, n, name_of, S, M, labels, ordered)

    keep = np.ones(len(P), dtype=bool)
    if ordered:
        keep = (ii >= jj) & (jj >= kk)
    return RegionMap(
        resolution=1.0 / n,
        priors=P[keep],
        grouping_ids=[g for g, k in zip(ids, keep) if k],
        gains=gains[keep],
        assignments=assignments[keep],
        junctions=junctions,
    )


def _is_ordered(p, tol=1e-12):
    return p[0] >= p[1] - tol and p[1] >= p[2] - tol


def _verified_junction(triple_scores, S, node_priors, n, gain_tol=1e-9):
    """Exact tie point of three groupings if it is a genuine junction near the nodes."""
    pt = _equal_gain_point(triple_scores)
    if pt is None or min(pt) < -1e-12:
        return None
    p = np.asarray(pt)
    if np.abs(node_priors - p[:2]).max(axis=1).min() > 2.0 / n:
        return None
    if (S @ p).max() > float(triple_scores[0] @ p) + gain_tol:
        return None
    return pt


# neighbours of a node on the triangular lattice, in (pi1, pi2) index steps
_HEX = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def _find_junctions(grid, wgrid, n, name_of, S, M, labels, ordered):
    """Clusters of nodes whose lattice neighbourhood holds three or more region ids.

    A node and its six neighbours span the triangles touching it, so this
    catches every triangle with three distinct corners and also regions
    only one node wide, which no single triangle resolves.
    """
    pad = np.pad(grid, 1, constant_values=-1)
    shifted = np.stack([pad[1 + di:n + 2 + di, 1 + dj:n + 2 + dj] for di, dj in _HEX])
    srt = np.sort(shifted, axis=0)
    distinct = ((srt[1:] != srt[:-1]) & (srt[1:] >= 0)).sum(axis=0) + (srt[0] >= 0)
    cand = np.argwhere((distinct >= 3) & (grid >= 0))
    if len(cand) == 0:
        return []
    pairs = cKDTree(cand).query_pairs(1.5, output_type="ndarray")
    adj = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else ([], ([], [])),
        shape=(len(cand), len(cand)),
    )
    ncomp, label = connected_components(adj, directed=False)
    out = []
    for comp in range(ncomp):
        nodes = cand[label == comp]
        centre = nodes.mean(axis=0)
        pt = centre / n
        p3 = 1.0 - pt[0] - pt[1]
        if ordered and not (pt[0] >= pt[1] - 1.0 / n and pt[1] >= p3 - 1.0 / n):
            continue
        # each region's representative is its window node closest to the centre
        best = {}
        for i, j in nodes:
            for di, dj in _HEX:
                a, b = i + di, j + dj
                if 0 <= a <= n and 0 <= b <= n and grid[a, b] >= 0:
                    name = name_of[int(grid[a, b])]
                    dist = (a - centre[0]) ** 2 + (b - centre[1]) ** 2
                    if name not in best or dist < best[name][0]:
                        best[name] = (dist, int(wgrid[a, b]))
        names = tuple(sorted(best))
        grid_pt = (float(pt[0]), float(pt[1]), float(p3))
        found = []
        for triple in combinations(names, 3):
            exact = _verified_junction([S[best[r][1]] for r in triple], S, nodes / n, n)
            if exact is not None and not (ordered and not _is_ordered(exact)):
                if all(max(abs(x - y) for x, y in zip(exact, f[0])) > 1e-9 for f in found):
                    found.append((exact, triple))
        if not found:
            if ordered and not (pt[0] >= pt[1] - 1.0 / n and pt[1] >= p3 - 1.0 / n):
                continue
            found = [(grid_pt, names)]
        for exact, triple in found:
            out.append(Junction(
                point=exact,
                grid_point=grid_pt,
                region_ids=triple,
                verified=triple is not names,
                groupings={r: grouping_at(best[r][1], M, labels) for r in triple},
                score_vectors={r: S[best[r][1]] for r in triple},
            ))
    out.sort(key=lambda jn: jn.point)
    return out
