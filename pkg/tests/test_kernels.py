"""The compiled kernels and their numpy fallbacks must agree."""
import numpy as np
import pytest

from helpers import random_hermitian, random_povm
from qdet import _backend, _fallback
from qdet.bayes import min_error_cost

BACKENDS = _backend.available_backends()
needs_core = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_fallback_always_available():
    assert "numpy" in BACKENDS
    assert _backend.BACKEND in BACKENDS


@needs_core
@pytest.mark.parametrize("d", [1, 2, 4, 7])
def test_jacobi_agrees(d, rng):
    core = BACKENDS["cython"]
    a = random_hermitian(d, rng)
    w1, v1, s1, _ = core.jacobi_eigh(a)
    w2, v2, s2, _ = _fallback.jacobi_eigh(a)
    assert s1 >= 0 and s2 >= 0
    np.testing.assert_allclose(np.sort(w1), np.sort(w2), atol=1e-12)
    np.testing.assert_allclose(np.sort(w1), np.linalg.eigvalsh(a), atol=1e-12)


@needs_core
def test_jacobi_flags_nonconvergence():
    w, v, sweeps, off = BACKENDS["cython"].jacobi_eigh(random_hermitian(5, np.random.default_rng(0)), 1e-13, 0)
    assert sweeps == -1 and off > 0


@needs_core
def test_batched_eigenvalues_agree(rng):
    stack = np.array([random_hermitian(3, rng) for _ in range(20)])
    np.testing.assert_allclose(BACKENDS["cython"].eigvalsh_batch(stack), _fallback.eigvalsh_batch(stack), atol=1e-12)


@needs_core
@pytest.mark.parametrize("d, M, N", [(2, 4, 3), (3, 5, 2), (2, 3, 4)])
def test_grouping_scores_agree(d, M, N, rng):
    E = np.ascontiguousarray(random_povm(d, M, rng).elements)
    B = np.ascontiguousarray(1 - min_error_cost(N))
    total = N**M
    a = BACKENDS["cython"].grouping_scores(E, B, 0, total)
    b = _fallback.grouping_scores(E, B, 0, total)
    np.testing.assert_allclose(a, b, atol=1e-12)
    part = BACKENDS["cython"].grouping_scores(E, B, 5, 9)
    np.testing.assert_allclose(part, b[5:9], atol=1e-12)


@needs_core
@pytest.mark.parametrize("d, M, N", [(2, 4, 2), (3, 4, 3), (2, 3, 1)])
def test_unambiguous_scores_agree(d, M, N, rng):
    E = np.ascontiguousarray(random_povm(d, M, rng, max_rank=1).elements)
    total = (N + 1) ** M
    a = BACKENDS["cython"].unambiguous_scores(E, N, 0, total)
    b = _fallback.unambiguous_scores(E, N, 0, total)
    np.testing.assert_allclose(a, b, atol=1e-10)


@needs_core
def test_blahut_arimoto_agrees(rng):
    W = rng.random((4, 3))
    W = np.ascontiguousarray(W / W.sum(axis=1, keepdims=True))
    r0 = np.full(4, 0.25)
    a = BACKENDS["cython"].blahut_arimoto(W, r0, 1e-13, 100_000)
    b = _fallback.blahut_arimoto(W, r0, 1e-13, 100_000)
    assert a[0] == pytest.approx(b[0], abs=1e-12)
    np.testing.assert_allclose(a[1], b[1], atol=1e-9)
    assert a[2] == b[2]
