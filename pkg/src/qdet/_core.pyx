# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: complex Hermitian Jacobi and the grouping scans.

Mirrors the API of :mod:`qdet._fallback` exactly; :mod:`qdet._backend`
picks one of the two at import time.
"""
import numpy as np

from libc.math cimport sqrt, fabs, log, exp, NAN
from libc.stdlib cimport malloc, free

NAME = "cython"


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _jacobi(double complex* a, int n, double* w, double complex* v, bint want_v,
                 double tol_rel, int max_sweeps, double* off_out) noexcept nogil:
    """Cyclic Jacobi on the row-major Hermitian buffer ``a`` (overwritten).

    Returns the number of sweeps used, or -1 if the off-diagonal norm did not
    drop below ``tol_rel * ||a||_F`` within ``max_sweeps``.
    """
    cdef int i, j, k, p, q, sweep
    cdef double norm2 = 0.0, off2 = 0.0, thresh, mag, theta, t, c, s, app, aqq
    cdef double complex ph, phc, x, y

    for i in range(n * n):
        norm2 += _abs2(a[i])
    if want_v:
        for i in range(n):
            for j in range(n):
                v[i * n + j] = 1.0 if i == j else 0.0
    thresh = tol_rel * sqrt(norm2)

    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off2 += _abs2(a[p * n + q])
        if sqrt(off2) <= thresh:
            for i in range(n):
                w[i] = a[i * n + i].real
            off_out[0] = sqrt(off2)
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = sqrt(_abs2(a[p * n + q]))
                if mag == 0.0:
                    continue
                ph = a[p * n + q] / mag
                phc = ph.conjugate()
                app = a[p * n + p].real
                aqq = a[q * n + q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k * n + p]
                    y = a[k * n + q]
                    a[k * n + p] = c * x - s * phc * y
                    a[k * n + q] = s * x + c * phc * y
                for k in range(n):
                    x = a[p * n + k]
                    y = a[q * n + k]
                    a[p * n + k] = c * x - s * ph * y
                    a[q * n + k] = s * x + c * ph * y
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                a[p * n + p] = app - t * mag
                a[q * n + q] = aqq + t * mag
                if want_v:
                    for k in range(n):
                        x = v[k * n + p]
                        y = v[k * n + q]
                        v[k * n + p] = c * x - s * phc * y
                        v[k * n + q] = s * x + c * phc * y
    off_out[0] = sqrt(off2)
    for i in range(n):
        w[i] = a[i * n + i].real
    return -1


cdef double _lambda_max(double complex* a, int n, double* w, double tol_rel, int max_sweeps) noexcept nogil:
    cdef double off
    cdef int i
    cdef double best
    if _jacobi(a, n, w, NULL, 0, tol_rel, max_sweeps, &off) < 0:
        return NAN
    best = w[0]
    for i in range(1, n):
        if w[i] > best:
            best = w[i]
    return best


def jacobi_eigh(a, double tol_rel=1e-13, int max_sweeps=100, bint want_vectors=True):
    """Unsorted eigenpairs of a Hermitian matrix.

    Returns ``(w, V, sweeps, off_norm)``; ``sweeps`` is -1 on non-convergence.
    """
    buf = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef int n = buf.shape[0]
    w = np.empty(n, dtype=np.float64)
    vecs = np.empty((n, n), dtype=np.complex128) if want_vectors else None
    cdef double complex[:, ::1] bv = buf
    cdef double[::1] wv = w
    cdef double complex[:, ::1] vv
    cdef double off = 0.0
    cdef int sweeps
    if n == 0:
        return w, vecs, 0, 0.0
    if want_vectors:
        vv = vecs
        with nogil:
            sweeps = _jacobi(&bv[0, 0], n, &wv[0], &vv[0, 0], 1, tol_rel, max_sweeps, &off)
    else:
        with nogil:
            sweeps = _jacobi(&bv[0, 0], n, &wv[0], NULL, 0, tol_rel, max_sweeps, &off)
    return w, vecs, sweeps, off


def eigvalsh_batch(stack, double tol_rel=1e-13, int max_sweeps=100):
    """Ascending eigenvalues of each matrix in a ``(K, d, d)`` stack."""
    buf = np.array(stack, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t K = buf.shape[0], idx
    cdef int d = buf.shape[1]
    out = np.empty((K, d), dtype=np.float64)
    cdef double complex[:, :, ::1] bv = buf
    cdef double[:, ::1] ov = out
    cdef double off
    cdef int i
    with nogil:
        for idx in range(K):
            if _jacobi(&bv[idx, 0, 0], d, &ov[idx, 0], NULL, 0, tol_rel, max_sweeps, &off) < 0:
                for i in range(d):
                    ov[idx, i] = NAN
    out.sort(axis=1)
    return out


def grouping_scores(const double complex[:, :, ::1] E, const double[:, ::1] B,
                    long long start, long long stop,
                    double tol_rel=1e-13, int max_sweeps=100):
    """Largest eigenvalue of ``sum_k B[i, a_k] E_k`` for groupings ``start..stop``.

    Grouping ``g`` is the base-``L`` expansion of ``g`` with the first outcome
    as the most significant digit (lexicographic order over assignments).
    """
    cdef int M = E.shape[0], d = E.shape[1]
    cdef int N = B.shape[0], L = B.shape[1]
    cdef long long count = stop - start, g, r
    out = np.empty((count, N), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef int i, k, x, dd = d * d
    cdef double coef
    cdef int* digits = <int*> malloc(M * sizeof(int))
    cdef double complex* op = <double complex*> malloc(dd * sizeof(double complex))
    cdef double* w = <double*> malloc(d * sizeof(double))
    if digits == NULL or op == NULL or w == NULL:
        free(digits); free(op); free(w)
        raise MemoryError()
    try:
        with nogil:
            for g in range(start, stop):
                r = g
                for k in range(M - 1, -1, -1):
                    digits[k] = <int> (r % L)
                    r = r // L
                for i in range(N):
                    for x in range(dd):
                        op[x] = 0.0
                    for k in range(M):
                        coef = B[i, digits[k]]
                        if coef != 0.0:
                            for x in range(dd):
                                op[x] = op[x] + coef * E[k, x // d, x % d]
                    o[g - start, i] = _lambda_max(op, d, w, tol_rel, max_sweeps)
    finally:
        free(digits); free(op); free(w)
    return out


def unambiguous_scores(const double complex[:, :, ::1] E, int N,
                       long long start, long long stop, double kernel_rel_tol=1e-9,
                       double tol_rel=1e-13, int max_sweeps=100):
    """Per-slot conclusive scores for groupings into ``N`` conclusive labels plus
    the inconclusive label ``N``.

    Slot ``i`` scores the largest eigenvalue of the slot operator compressed
    to the kernel of the other conclusive operators; a grouping where any
    kernel is trivial is flagged with -1 in every slot.
    """
    cdef int M = E.shape[0], d = E.shape[1]
    cdef int L = N + 1
    cdef long long count = stop - start, g, r
    out = np.empty((count, N), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef int i, j, k, x, y, z, rank, dd = d * d, nslot
    cdef double maxabs, tol, off, val
    cdef double complex acc
    cdef int* digits = <int*> malloc(M * sizeof(int))
    cdef int* kidx = <int*> malloc(d * sizeof(int))
    cdef double complex* S = <double complex*> malloc(dd * sizeof(double complex))
    cdef double complex* V = <double complex*> malloc(dd * sizeof(double complex))
    cdef double complex* T = <double complex*> malloc(dd * sizeof(double complex))
    cdef double complex* R = <double complex*> malloc(dd * sizeof(double complex))
    cdef double* w = <double*> malloc(d * sizeof(double))
    if digits == NULL or kidx == NULL or S == NULL or V == NULL or T == NULL or R == NULL or w == NULL:
        free(digits); free(kidx); free(S); free(V); free(T); free(R); free(w)
        raise MemoryError()
    try:
        with nogil:
            for g in range(start, stop):
                r = g
                for k in range(M - 1, -1, -1):
                    digits[k] = <int> (r % L)
                    r = r // L
                for i in range(N):
                    for x in range(dd):
                        S[x] = 0.0
                        T[x] = 0.0
                    nslot = 0
                    for k in range(M):
                        if digits[k] == i:
                            nslot += 1
                            for x in range(dd):
                                T[x] = T[x] + E[k, x // d, x % d]
                        elif digits[k] < N:
                            for x in range(dd):
                                S[x] = S[x] + E[k, x // d, x % d]
                    maxabs = 0.0
                    for x in range(dd):
                        val = sqrt(_abs2(S[x]))
                        if val > maxabs:
                            maxabs = val
                    tol = kernel_rel_tol * (maxabs if maxabs > 1.0 else 1.0)
                    if _jacobi(S, d, w, V, 1, tol_rel, max_sweeps, &off) < 0:
                        for j in range(N):
                            o[g - start, j] = NAN
                        break
                    rank = 0
                    for j in range(d):
                        if fabs(w[j]) <= tol:
                            kidx[rank] = j
                            rank += 1
                    if rank == 0:
                        for j in range(N):
                            o[g - start, j] = -1.0
                        break
                    if nslot == 0:
                        o[g - start, i] = 0.0
                        continue
                    # R = Q^dagger T Q with Q the kernel columns of V
                    for y in range(rank):
                        for z in range(rank):
                            acc = 0.0
                            for x in range(d):
                                for j in range(d):
                                    acc = acc + V[x * d + kidx[y]].conjugate() * T[x * d + j] * V[j * d + kidx[z]]
                            R[y * rank + z] = acc
                    o[g - start, i] = _lambda_max(R, rank, w, tol_rel, max_sweeps)
    finally:
        free(digits); free(kidx); free(S); free(V); free(T); free(R); free(w)
    return out


def blahut_arimoto(const double[:, ::1] W, r0, double tol, int max_iter):
    """Blahut-Arimoto iterations; returns ``(lower_nats, prior, iterations, gap_nats)``."""
    cdef Py_ssize_t n = W.shape[0], m = W.shape[1], i, j
    cdef double[::1] r = np.array(r0, dtype=np.float64, copy=True)
    cdef double[::1] q = np.empty(m)
    cdef double[::1] logq = np.empty(m)
    cdef double[::1] D = np.empty(n)
    cdef double[::1] wlogw = np.zeros(n)
    cdef double dmax, s, lower = 0.0, gap = 1e300
    cdef int it = 0
    with nogil:
        for i in range(n):
            for j in range(m):
                if W[i, j] > 0:
                    wlogw[i] += W[i, j] * log(W[i, j])
        while it < max_iter:
            it += 1
            for j in range(m):
                q[j] = 0.0
            for i in range(n):
                for j in range(m):
                    q[j] += r[i] * W[i, j]
            for j in range(m):
                logq[j] = log(q[j]) if q[j] > 0 else 0.0
            dmax = -1e300
            for i in range(n):
                s = wlogw[i]
                for j in range(m):
                    s -= W[i, j] * logq[j]
                D[i] = s
                if s > dmax:
                    dmax = s
            s = 0.0
            for i in range(n):
                D[i] = r[i] * exp(D[i] - dmax)
                s += D[i]
            lower = dmax + log(s)
            gap = dmax - lower
            if gap < tol:
                break
            for i in range(n):
                r[i] = D[i] / s
    return lower, np.asarray(r), it, gap
