"""Capacity of a measurement: the largest input/outcome mutual information.

Exact paths cover two-outcome detectors (closed form), commuting detectors
(Blahut-Arimoto on the common eigenbasis) and group-covariant detectors
(a single seed state whose orbit is optimal). Everything else goes through a
multi-start alternating search that only certifies a lower bound.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize
from scipy.special import xlogy

from .errors import NotCommutingError, NotCovariantError, NotIrreducibleError, ValidationError
from .information import (
    LN2,
    binary_capacity,
    blahut_arimoto,
    entropy,
    mutual_information,
    subentropy,
    von_neumann_entropy,
)
from .linalg import eig_hermitian, eigvalsh, lambda_max, lambda_min
from .povm import born_matrix, make_ensemble

COMMUTE_TOL = 1e-9
UNITARY_TOL = 1e-10
COVARIANCE_TOL = 1e-9
IRREDUCIBLE_TOL = 1e-9
PRUNE_TOL = 1e-10
COVARIANT_GRID_CAP = 10**5
METHODS = ("auto", "binary", "commuting", "covariant", "general")


@dataclass
class CapacityResult:
    """Capacity in bits with an ensemble that attains it.

    ``certified`` is False only for the general search, whose value is a
    lower bound.
    """

    bits: float
    ensemble: object
    vectors: np.ndarray
    method: str
    certified: bool
    diagnostics: dict = field(default_factory=dict)


def _pure_ensemble(priors, vectors):
    priors = np.asarray(priors, dtype=float)
    vectors = np.asarray(vectors, dtype=np.complex128)
    keep = priors > PRUNE_TOL
    if not keep.any():
        keep[np.argmax(priors)] = True
    priors, vectors = priors[keep], vectors[keep]
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    return make_ensemble(priors / priors.sum(), vectors), vectors


def _achieved_bits(ensemble, povm):
    return mutual_information(born_matrix(ensemble, povm))


# ---------------------------------------------------------------------------
# exact paths


def capacity_binary(povm):
    """Two-outcome detectors: the extreme eigenvalues of ``E_1`` define the channel."""
    if povm.num_outcomes != 2:
        raise ValidationError(f"binary path needs 2 outcomes, got {povm.num_outcomes}")
    alpha, va = lambda_max(povm[0])
    beta, vb = lambda_min(povm[0])
    alpha, beta = float(np.clip(alpha, 0, 1)), float(np.clip(beta, 0, 1))
    bits, p = binary_capacity(alpha, beta)
    ensemble, vecs = _pure_ensemble([p, 1 - p], [va, vb])
    return CapacityResult(bits, ensemble, vecs, "binary-closed-form", True,
                          {"alpha": alpha, "beta": beta, "prior": p})


def commutator_check(povm, tol=COMMUTE_TOL):
    """Raise :class:`NotCommutingError` for the first non-commuting pair."""
    E = povm.elements
    scale = max(1.0, float(np.abs(E).max()))
    for i in range(len(E)):
        for j in range(i + 1, len(E)):
            norm = float(np.abs(E[i] @ E[j] - E[j] @ E[i]).max())
            if norm > tol * scale:
                raise NotCommutingError(i + 1, j + 1, norm)


def is_commuting(povm, tol=COMMUTE_TOL):
    try:
        commutator_check(povm, tol)
    except NotCommutingError:
        return False
    return True


def common_eigenbasis(povm, tol=COMMUTE_TOL):
    """Unitary whose columns diagonalise every element of a commuting POVM."""
    commutator_check(povm, tol)
    M = povm.num_outcomes
    # irrational weights avoid accidental degeneracies of the combination
    weights = np.sqrt(np.arange(2, M + 2)) + np.pi / np.arange(1, M + 1)
    V = eig_hermitian(np.einsum("k,kxy->xy", weights, povm.elements)).eigenvectors
    rot = np.einsum("xa,kxy,yb->kab", V.conj(), povm.elements, V)
    off = np.abs(rot - np.einsum("kaa,ab->kab", rot, np.eye(povm.dim))).max()
    if off > 1e3 * tol:
        raise NotCommutingError(0, 0, float(off))
    return V


def capacity_commuting(povm):
    """Blahut-Arimoto on the classical channel ``W[x, j] = <v_x|E_j|v_x>``."""
    V = common_eigenbasis(povm)
    W = np.einsum("xa,kxy,ya->ak", V.conj(), povm.elements, V).real
    W = np.clip(W, 0.0, None)
    ba = blahut_arimoto(W)
    ensemble, vecs = _pure_ensemble(ba.prior, V.T)
    return CapacityResult(ba.capacity, ensemble, vecs, "commuting-BA", True,
                          {"iterations": ba.iterations, "gap": ba.gap, "channel": W})


# ---------------------------------------------------------------------------
# covariant path


@dataclass(frozen=True, eq=False)
class GroupAction:
    """Finite group acting on operators by ``R_g(X) = U_g X U_g^dagger``.

    When ``conjugate[g]`` is set the action is antiunitary,
    ``R_g(X) = U_g conj(X) U_g^dagger``. ``permutations[g][j]`` is the outcome
    index ``g.j`` with ``R_g(E_j) = E_{g.j}``.
    """

    unitaries: np.ndarray
    conjugate: np.ndarray
    permutations: np.ndarray
    identity: int = 0

    def __post_init__(self):
        U = np.asarray(self.unitaries, dtype=np.complex128)
        conj = np.asarray(self.conjugate, dtype=bool)
        perms = np.asarray(self.permutations, dtype=np.int64)
        if U.ndim != 3 or U.shape[1] != U.shape[2]:
            raise ValidationError(f"unitaries must have shape (G, d, d), got {U.shape}")
        if conj.shape != (len(U),) or perms.ndim != 2 or len(perms) != len(U):
            raise ValidationError("conjugate flags and permutations must have one entry per group element")
        if not 0 <= self.identity < len(U):
            raise ValidationError(f"identity index {self.identity} out of range")
        object.__setattr__(self, "unitaries", U)
        object.__setattr__(self, "conjugate", conj)
        object.__setattr__(self, "permutations", perms)

    @property
    def order(self):
        return len(self.unitaries)

    @property
    def dim(self):
        return self.unitaries.shape[1]

    def act(self, g, X):
        U = self.unitaries[g]
        X = np.conj(X) if self.conjugate[g] else X
        return U @ X @ U.conj().T

    def act_on_vector(self, g, psi):
        psi = np.conj(psi) if self.conjugate[g] else psi
        return self.unitaries[g] @ psi

    def verify(self, povm):
        """Check unitarity, closure of the permutations and covariance of ``povm``."""
        d, M = self.dim, povm.num_outcomes
        if d != povm.dim:
            raise NotCovariantError(f"group acts in dimension {d}, POVM in {povm.dim}")
        if self.permutations.shape[1] != M:
            raise NotCovariantError(f"permutations act on {self.permutations.shape[1]} outcomes, POVM has {M}")
        eye = np.eye(d)
        for g, U in enumerate(self.unitaries):
            err = np.abs(U.conj().T @ U - eye).max()
            if err > UNITARY_TOL:
                raise NotCovariantError(f"group element {g + 1} is not unitary (error {err:.3g})")
        perms = {tuple(p) for p in self.permutations}
        if any(sorted(p) != list(range(M)) for p in perms):
            raise NotCovariantError("every outcome map must be a permutation")
        if tuple(self.permutations[self.identity]) != tuple(range(M)):
            raise NotCovariantError("identity element does not fix the outcomes")
        for p in self.permutations:
            for q in self.permutations:
                if tuple(p[q]) not in perms:
                    raise NotCovariantError("outcome permutations are not closed under composition")
        for g in range(self.order):
            for j in range(M):
                err = np.abs(self.act(g, povm[j]) - povm[self.permutations[g, j]]).max()
                if err > COVARIANCE_TOL:
                    raise NotCovariantError(
                        f"element {g + 1} maps outcome {j + 1} off outcome "
                        f"{self.permutations[g, j] + 1} (error {err:.3g})"
                    )
        return self

    def fixed_space_dimension(self, tol=IRREDUCIBLE_TOL):
        """Dimension of the space of Hermitian operators fixed by every ``R_g``."""
        d = self.dim
        basis = []
        for a in range(d):
            for b in range(d):
                X = np.zeros((d, d), dtype=np.complex128)
                if a == b:
                    X[a, a] = 1
                elif a < b:
                    X[a, b] = X[b, a] = 1
                else:
                    X[a, b], X[b, a] = 1j, -1j
                basis.append(X)

        def vec(X):
            return np.concatenate([X.real.ravel(), X.imag.ravel()])

        blocks = [np.array([vec(self.act(g, X) - X) for X in basis]).T for g in range(self.order)]
        A = np.vstack(blocks)
        return null_space(A, rcond=tol).shape[1]

    def is_irreducible(self, tol=IRREDUCIBLE_TOL):
        return self.fixed_space_dimension(tol) == 1

    def orbit(self, psi, tol=1e-10):
        """Distinct states ``R_g(|psi><psi|)`` with multiplicity weights summing to one."""
        vecs, weights = [], []
        for g in range(self.order):
            v = self.act_on_vector(g, psi)
            v = v / np.linalg.norm(v)
            for k, w in enumerate(vecs):
                if abs(np.vdot(w, v)) ** 2 > 1 - tol:
                    weights[k] += 1.0 / self.order
                    break
            else:
                vecs.append(v)
                weights.append(1.0 / self.order)
        return np.array(vecs), np.array(weights)


def hyperspherical_state(params):
    """Unit vectors from ``d - 1`` polar angles followed by ``d - 1`` phases.

    Works on stacked parameter arrays of shape ``(..., 2(d-1))``.
    """
    params = np.asarray(params, dtype=float)
    k = params.shape[-1] // 2
    theta, phi = params[..., :k], params[..., k:]
    s = np.cumprod(np.concatenate([np.ones(theta.shape[:-1] + (1,)), np.sin(theta)], axis=-1), axis=-1)
    c = np.concatenate([np.cos(theta), np.ones(theta.shape[:-1] + (1,))], axis=-1)
    amp = s * c
    phase = np.exp(1j * np.concatenate([np.zeros(phi.shape[:-1] + (1,)), phi], axis=-1))
    return amp * phase


def _outcome_probs(E, psi):
    return np.einsum("...x,jxy,...y->...j", psi.conj(), E, psi).real.clip(0.0, None)


def covariant_objective(povm, psi):
    """Mutual information of the orbit ensemble seeded by ``psi``.

    For an irreducible covariant detector the orbit's outcome marginal is
    ``Tr E_j / d``, so the value is ``H(Tr E / d) - H(<psi|E|psi>)`` in bits.
    """
    t = np.trace(povm.elements, axis1=1, axis2=2).real / povm.dim
    return entropy(t) - entropy(_outcome_probs(povm.elements, psi))


def covariant_grid(d, cap=COVARIANT_GRID_CAP):
    """Seed parameters for the pure-state search, in a fixed order."""
    if d == 2:
        theta = np.pi * (np.arange(32) + 0.5) / 32 / 2
        phi = 2 * np.pi * np.arange(64) / 64
        t, p = np.meshgrid(theta, phi, indexing="ij")
        return np.stack([t.ravel(), p.ravel()], axis=1)
    k = d - 1
    n = max(2, int(np.floor(cap ** (1.0 / (2 * k)) + 1e-9)))
    axes = [np.pi / 2 * (np.arange(n) + 0.5) / n] * k + [2 * np.pi * np.arange(n) / n] * k
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def capacity_covariant(povm, group, refine=8):
    """Capacity of a detector covariant under an irreducible finite group.

    A coarse grid of seed states is scored, the best ``refine`` are polished
    by Nelder-Mead, and the winning seed's orbit is returned as the optimal
    ensemble. Ties keep the earliest seed in grid order.

    Raises
    ------
    NotCovariantError, NotIrreducibleError
    """
    group.verify(povm)
    if not group.is_irreducible():
        raise NotIrreducibleError(f"the group fixes a {group.fixed_space_dimension()}-dimensional space of operators")
    grid = covariant_grid(povm.dim)
    values = np.concatenate([covariant_objective(povm, hyperspherical_state(grid[a:a + 8192]))
                             for a in range(0, len(grid), 8192)])
    top = np.argsort(-values, kind="stable")[:refine]
    best_val, best_x, evals = -np.inf, None, 0
    for i in sorted(top):
        res = minimize(lambda x: -covariant_objective(povm, hyperspherical_state(x)), grid[i],
                       method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
        evals += res.nfev
        if -res.fun > best_val + 1e-12:
            best_val, best_x = -res.fun, res.x
    seed = hyperspherical_state(best_x)
    vecs, weights = group.orbit(seed)
    ensemble, vecs = _pure_ensemble(weights, vecs)
    bits = _achieved_bits(ensemble, povm)
    if abs(bits - best_val) > 1e-9:
        raise ArithmeticError(f"orbit information {bits:.12g} disagrees with seed objective {best_val:.12g}")
    return CapacityResult(bits, ensemble, vecs, "covariant-seed", True,
                          {"seed": seed, "grid_points": len(grid), "evaluations": evals,
                           "orbit_size": len(vecs), "group_order": group.order})


# ---------------------------------------------------------------------------
# general path


def _tangent_directions(psi, rng, extra):
    d = len(psi)
    dirs = np.concatenate([np.eye(d), 1j * np.eye(d), rng.standard_normal((extra, d)) + 1j * rng.standard_normal((extra, d))])
    dirs = dirs - np.outer(dirs @ psi.conj(), psi)
    norms = np.linalg.norm(dirs, axis=1)
    dirs = dirs[norms > 1e-12] / norms[norms > 1e-12, None]
    return np.concatenate([dirs, -dirs])


def _nats_info(p_out, W, priors):
    return -xlogy(p_out, p_out).sum() + priors @ xlogy(W, W).sum(axis=1)


class _AlternatingSearch:
    """One restart of the alternating prior/state optimisation."""

    def __init__(self, E, rng, num_states, h0=0.3, h_min=1e-7, inner=6, extra=2):
        self.E, self.rng = E, rng
        d = E.shape[1]
        z = rng.standard_normal((num_states, d)) + 1j * rng.standard_normal((num_states, d))
        self.psi = z / np.linalg.norm(z, axis=1, keepdims=True)
        self.W = _outcome_probs(E, self.psi)
        self.priors = np.full(num_states, 1.0 / num_states)
        self.steps = np.full(num_states, h0)
        self.h_min, self.inner, self.extra = h_min, inner, extra

    def update_priors(self, max_iter):
        start = 0.95 * self.priors + 0.05 / len(self.priors)
        ba = blahut_arimoto(self.W, tol=1e-14, max_iter=max_iter, init=start)
        self.priors = ba.prior
        return ba

    def value(self):
        return _nats_info(self.priors @ self.W, self.W, self.priors)

    def improve_states(self):
        W, pri = self.W, self.priors
        for i in range(len(pri)):
            p_rest = pri @ W - pri[i] * W[i]
            if pri[i] > 1e-8:
                def f(Q):
                    p = p_rest + pri[i] * Q
                    return -xlogy(p, p).sum(axis=-1) + pri[i] * xlogy(Q, Q).sum(axis=-1)
            else:
                p_out = pri @ W
                logp = np.log(np.where(p_out > 0, p_out, 1.0))
                def f(Q):
                    return xlogy(Q, Q).sum(axis=-1) - Q @ logp
            cur = f(W[i])
            h = self.steps[i]
            for _ in range(self.inner):
                if h < self.h_min:
                    break
                cand = self.psi[i] + h * _tangent_directions(self.psi[i], self.rng, self.extra)
                cand /= np.linalg.norm(cand, axis=1, keepdims=True)
                Q = _outcome_probs(self.E, cand)
                vals = f(Q)
                k = int(np.argmax(vals))
                if vals[k] > cur + 1e-15:
                    self.psi[i], W[i], cur = cand[k], Q[k], vals[k]
                    h *= 1.5
                else:
                    h *= 0.5
            self.steps[i] = h

    def run(self, max_outer, tol):
        self.update_priors(5000)
        prev = self.value()
        outer = 0
        for outer in range(1, max_outer + 1):
            self.improve_states()
            self.update_priors(2000)
            val = self.value()
            if abs(val - prev) < tol * LN2 and self.steps.max() < self.h_min:
                break
            prev = val
        return outer


def capacity_general(povm, restarts=32, seed=0, max_outer=400, tol=1e-10):
    """Multi-start alternating maximisation over ``d**2`` pure input states.

    Each restart alternates Blahut-Arimoto for the priors with a
    derivative-free pattern search for each state on the unit sphere; a state
    with negligible prior instead maximises its divergence from the current
    outcome distribution, so it can re-enter the support. Restarts use
    independent streams spawned from ``seed``; the best value wins, with ties
    going to the earlier restart. The result is a lower bound on the capacity.
    """
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")
    E = np.ascontiguousarray(povm.elements)
    n_states = povm.dim**2
    streams = np.random.SeedSequence(seed).spawn(restarts)
    best, best_run, history = None, -1, []
    for r, ss in enumerate(streams):
        search = _AlternatingSearch(E, np.random.default_rng(ss), n_states)
        iters = search.run(max_outer, tol)
        search.update_priors(200_000)
        val = search.value() / LN2
        history.append((float(val), iters))
        if best is None or val > best[0] + 1e-12:
            best, best_run = (val, search.priors.copy(), search.psi.copy()), r
    val, priors, psi = best
    ensemble, vecs = _pure_ensemble(priors, psi)
    bits = _achieved_bits(ensemble, povm)
    return CapacityResult(bits, ensemble, vecs, "general-alternating", False,
                          {"restarts": restarts, "seed": seed, "best_restart": best_run,
                           "restart_values": [h[0] for h in history],
                           "outer_iterations": [h[1] for h in history], "num_states": n_states})


# ---------------------------------------------------------------------------
# dispatcher and bounds


def capacity(povm, group=None, method="auto", restarts=32, seed=0):
    """Capacity in bits, choosing the strongest applicable solver.

    ``auto`` takes the closed form for two outcomes, Blahut-Arimoto for
    commuting elements, the covariant seed search when ``group`` is given,
    and the general search otherwise. In ``auto`` mode a group that fails
    the covariance or irreducibility check triggers a warning and the
    general search.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "auto":
        if povm.num_outcomes == 2:
            method = "binary"
        elif is_commuting(povm):
            method = "commuting"
        elif group is not None:
            try:
                return capacity_covariant(povm, group)
            except (NotCovariantError, NotIrreducibleError) as exc:
                warnings.warn(f"group rejected ({exc}); using the general search", stacklevel=2)
            method = "general"
        else:
            method = "general"
    if method == "binary":
        return capacity_binary(povm)
    if method == "commuting":
        return capacity_commuting(povm)
    if method == "covariant":
        if group is None:
            raise ValidationError("the covariant method needs a group action")
        return capacity_covariant(povm, group)
    return capacity_general(povm, restarts=restarts, seed=seed)


def _rescaled(povm):
    m = np.trace(povm.elements, axis1=1, axis2=2).real / povm.dim
    return m, povm.elements


def subentropy_lower_bound(povm):
    """``Q(I/d) - sum_i m_i Q(E_i / Tr E_i)`` with ``m_i = Tr E_i / d``."""
    m, E = _rescaled(povm)
    d = povm.dim
    total = subentropy(np.eye(d) / d)
    for mi, e in zip(m, E):
        if mi > 1e-14:
            total -= mi * subentropy(e / (mi * d))
    return float(total)


def holevo_of_rescaled_povm(povm):
    """``S(I/d) - sum_i m_i S(E_i / Tr E_i)``: a diagnostic, not a capacity bound."""
    m, E = _rescaled(povm)
    if m.min() <= 1e-14:
        raise ValidationError(f"outcome {int(np.argmin(m)) + 1} has a zero-trace element")
    return float(np.log2(povm.dim) - sum(mi * von_neumann_entropy(e / (mi * povm.dim)) for mi, e in zip(m, E)))


def max_capacity(d):
    """``log2 d``, reached exactly by rank-one projective measurements."""
    return float(np.log2(d))
