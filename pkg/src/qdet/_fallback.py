"""Numpy implementations of the kernels in ``_core.pyx``.

Same signatures and outputs. The scans batch over groupings and use LAPACK
(``numpy.linalg.eigvalsh``/``eigh``) rather than a per-matrix Jacobi loop,
which would be far too slow in interpreted Python.
"""
import numpy as np
from scipy.special import xlogy

NAME = "numpy"


def jacobi_eigh(a, tol_rel=1e-13, max_sweeps=100, want_vectors=True):
    """Unsorted eigenpairs of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V, sweeps, off_norm)``; ``sweeps`` is -1 on non-convergence.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if want_vectors else None
    thresh = tol_rel * np.linalg.norm(a)
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= thresh:
            return a.diagonal().real.copy(), v, sweep, off
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                x = a[:, p].copy()
                y = a[:, q].copy()
                a[:, p] = c * x - s * phc * y
                a[:, q] = s * x + c * phc * y
                x = a[p, :].copy()
                y = a[q, :].copy()
                a[p, :] = c * x - s * ph * y
                a[q, :] = s * x + c * ph * y
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                if want_vectors:
                    x = v[:, p].copy()
                    y = v[:, q].copy()
                    v[:, p] = c * x - s * phc * y
                    v[:, q] = s * x + c * phc * y
    return a.diagonal().real.copy(), v, -1, off


def eigvalsh_batch(stack, tol_rel=1e-13, max_sweeps=100):
    return np.linalg.eigvalsh(np.asarray(stack, dtype=np.complex128))


def _digits(start, stop, M, L):
    idx = np.arange(start, stop, dtype=np.int64)
    powers = L ** np.arange(M - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % L


def grouping_scores(E, B, start, stop, tol_rel=1e-13, max_sweeps=100):
    E = np.asarray(E, dtype=np.complex128)
    B = np.asarray(B, dtype=np.float64)
    digits = _digits(start, stop, E.shape[0], B.shape[1])
    coef = B[:, digits]  # (N, G, M)
    ops = np.einsum("ngm,mxy->gnxy", coef, E)
    return np.linalg.eigvalsh(ops)[..., -1]


def unambiguous_scores(E, N, start, stop, kernel_rel_tol=1e-9, tol_rel=1e-13, max_sweeps=100):
    E = np.asarray(E, dtype=np.complex128)
    M, d = E.shape[0], E.shape[1]
    digits = _digits(start, stop, M, N + 1)
    out = np.empty((stop - start, N))
    infeasible = np.zeros(stop - start, dtype=bool)
    for i in range(N):
        own = (digits == i).astype(float)
        other = ((digits != i) & (digits < N)).astype(float)
        S = np.einsum("gm,mxy->gxy", other, E)
        T = np.einsum("gm,mxy->gxy", own, E)
        w, V = np.linalg.eigh(S)
        tol = kernel_rel_tol * np.maximum(1.0, np.abs(S).max(axis=(1, 2)))
        in_kernel = np.abs(w) <= tol[:, None]
        infeasible |= ~in_kernel.any(axis=1)
        Q = V * in_kernel[:, None, :]
        P = Q @ np.conj(np.swapaxes(Q, 1, 2))
        out[:, i] = np.linalg.eigvalsh(P @ T @ P)[:, -1]
        out[own.sum(axis=1) == 0, i] = 0.0
    out[infeasible] = -1.0
    return out


def blahut_arimoto(W, r0, tol, max_iter):
    W = np.asarray(W, dtype=np.float64)
    r = np.array(r0, dtype=np.float64, copy=True)
    wlogw = xlogy(W, W).sum(axis=1)
    lower, gap, it = 0.0, np.inf, 0
    while it < max_iter:
        it += 1
        q = r @ W
        logq = np.log(np.where(q > 0, q, 1.0))
        D = wlogw - W @ logq
        dmax = D.max()
        z = r * np.exp(D - dmax)
        s = z.sum()
        lower = dmax + np.log(s)
        gap = dmax - lower
        if gap < tol:
            break
        r = z / s
    return lower, r, it, gap
