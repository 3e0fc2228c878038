"""Classical and quantum information quantities, all in bits.

``eta(0) = 0`` throughout, so zero probabilities and zero eigenvalues
contribute nothing.
"""
from dataclasses import dataclass, field
from math import factorial

import mpmath
import numpy as np
from scipy.special import expit, xlogy

from ._backend import kernels
from .errors import ValidationError
from .linalg import as_hermitian, eigvalsh

LN2 = np.log(2.0)
BA_TOL = 1e-13
BA_MAX_ITER = 200_000


def entropy(p, axis=-1):
    """Shannon entropy in bits along ``axis``."""
    p = np.asarray(p, dtype=float)
    return -xlogy(p, p).sum(axis=axis) / LN2


def binary_entropy(x):
    x = np.asarray(x, dtype=float)
    return entropy(np.stack([x, 1 - x], axis=-1))


def _check_joint(P, atol=1e-9):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.size == 0:
        raise ValidationError(f"joint distribution must be a non-empty matrix, got shape {P.shape}")
    if P.min() < -atol or abs(P.sum() - 1) > atol:
        raise ValidationError("joint distribution must be non-negative and sum to 1")
    return np.maximum(P, 0.0)


def mutual_information(P):
    """``I(X;Y)`` in bits for a joint distribution ``P[i, j]``."""
    P = _check_joint(P)
    return float(max(entropy(P.sum(axis=1)) + entropy(P.sum(axis=0)) - entropy(P.ravel()), 0.0))


@dataclass
class BAResult:
    """Blahut-Arimoto outcome; unpacks as ``(capacity, prior)``."""

    capacity: float
    prior: np.ndarray
    iterations: int
    gap: float
    history: list = field(default_factory=list, repr=False)

    def __iter__(self):
        return iter((self.capacity, self.prior))


def check_channel(W, atol=1e-9):
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.size == 0:
        raise ValidationError(f"channel must be a non-empty matrix, got shape {W.shape}")
    if W.min() < -atol or np.abs(W.sum(axis=1) - 1).max() > atol:
        raise ValidationError("channel rows must be probability distributions")
    W = np.maximum(W, 0.0)
    return W / W.sum(axis=1, keepdims=True)


def blahut_arimoto(channel, tol=BA_TOL, max_iter=BA_MAX_ITER, init=None, history=False):
    """Capacity of a discrete memoryless channel ``channel[i, j] = p(j | i)``.

    Iterates ``r_i <- r_i exp(D_i) / sum_k r_k exp(D_k)`` with
    ``D_i = D(p(.|i) || q)``. The capacity lies between ``log sum r_i exp(D_i)``
    and ``max_i D_i``; iteration stops when that gap (in nats) drops below
    ``tol``. ``init`` warm-starts the prior.

    Returns
    -------
    BAResult
        ``capacity`` is the lower end of the final bracket, in bits.
    """
    W = np.ascontiguousarray(check_channel(channel))
    n = W.shape[0]
    r = np.full(n, 1.0 / n) if init is None else np.asarray(init, dtype=float).copy()
    r = np.maximum(r, 0.0)
    r /= r.sum()
    if not history:
        lower, r, it, gap = kernels.blahut_arimoto(W, r, tol, max_iter)
        return BAResult(float(max(lower, 0.0) / LN2), r, int(it), float(gap / LN2))
    # one step at a time so every iterate's lower bound is recorded
    trace = []
    it = 0
    while it < max_iter:
        lower, r, _, gap = kernels.blahut_arimoto(W, r, tol, 1)
        it += 1
        trace.append(float(lower / LN2))
        if gap < tol:
            break
    return BAResult(float(max(lower, 0.0) / LN2), r, it, float(gap / LN2), trace)


def binary_capacity(alpha, beta):
    """Closed-form capacity of a binary-input, binary-output channel.

    Input ``a`` gives outcome 1 with probability ``alpha`` and input ``b``
    with probability ``beta``.

    Returns
    -------
    (float, float)
        Capacity in bits and the optimal probability of input ``a``.
        Equal columns give ``(0, 1/2)``.
    """
    alpha, beta = float(alpha), float(beta)
    if not (-1e-12 <= alpha <= 1 + 1e-12 and -1e-12 <= beta <= 1 + 1e-12):
        raise ValidationError(f"alpha={alpha}, beta={beta} must lie in [0, 1]")
    alpha, beta = min(max(alpha, 0.0), 1.0), min(max(beta, 0.0), 1.0)
    diff = beta - alpha
    if abs(diff) < 1e-15:
        return 0.0, 0.5
    ha, hb = float(binary_entropy(alpha)), float(binary_entropy(beta))
    x = (ha - hb) / diff
    cap = (alpha * hb - beta * ha) / diff + float(np.logaddexp2(0.0, x))
    # 1 / (1 + 2**(-x)) written stably
    p_a = beta / diff - float(expit(x * LN2)) / diff
    return max(cap, 0.0), float(np.clip(p_a, 0.0, 1.0))


def von_neumann_entropy(rho):
    w = np.clip(eigvalsh(as_hermitian(rho)), 0.0, None)
    return float(entropy(w))


def _xn_log_derivative(n, m, x):
    """``m``-th derivative (``m <= n``) of ``x**n * ln x`` at ``x > 0``."""
    harm = mpmath.fsum(mpmath.mpf(1) / k for k in range(n - m + 1, n + 1))
    return mpmath.mpf(factorial(n)) / factorial(n - m) * x ** (n - m) * (mpmath.log(x) + harm)


def subentropy_of_spectrum(eigenvalues, zero_tol=1e-14, merge_rtol=1e-12):
    """Subentropy in bits from a spectrum.

    ``Q = -sum_k prod_{l != k} lambda_k / (lambda_k - lambda_l) * lambda_k ln lambda_k``
    equals minus the divided difference of ``x**n ln x`` over the ``n``
    nonzero eigenvalues. The divided difference is evaluated in extended
    precision, and coincident eigenvalues use derivative values, which is
    the exact limit as they merge.
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    lam = lam[lam > zero_tol]
    n = len(lam)
    if n <= 1:
        return 0.0
    # snap near-coincident eigenvalues together so the table takes the confluent branch
    nodes = [lam[0]]
    for v in lam[1:]:
        nodes.append(nodes[-1] if v - nodes[-1] <= merge_rtol * v else v)
    with mpmath.workdps(40 + 12 * n):
        x = [mpmath.mpf(v) for v in nodes]
        table = [_xn_log_derivative(n, 0, xi) for xi in x]
        for order in range(1, n):
            new = []
            for i in range(n - order):
                j = i + order
                if x[j] == x[i]:
                    new.append(_xn_log_derivative(n, order, x[i]) / factorial(order))
                else:
                    new.append((table[i + 1] - table[i]) / (x[j] - x[i]))
            table = new
        return float(-table[0] / mpmath.log(2))


def subentropy(rho):
    """Subentropy ``Q(rho)`` in bits of a density operator."""
    rho = as_hermitian(rho)
    w = eigvalsh(rho)
    if w[-1] < -1e-9 or abs(w.sum() - 1) > 1e-9:
        raise ValidationError("subentropy needs a density operator (PSD, unit trace)")
    return subentropy_of_spectrum(np.clip(w, 0.0, None))
