"""Random instance generators and independent oracles shared by the tests."""
import numpy as np

from qdet.povm import validate_povm


def random_unitary(d, rng):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(d, rng):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def random_state_vector(d, rng):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    x = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_povm_elements(d, M, rng, max_rank=None):
    """Random POVM: random PSD operators conjugated by S^{-1/2}, S their sum."""
    max_rank = d if max_rank is None else max_rank
    while True:
        ops = []
        for _ in range(M):
            k = int(rng.integers(1, max_rank + 1))
            x = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
            ops.append(x @ x.conj().T)
        w, v = np.linalg.eigh(sum(ops))
        # resample when the operators do not span the space
        if w[0] > 1e-6 * w[-1]:
            break
    s = v @ np.diag(w**-0.5) @ v.conj().T
    return [s @ a @ s for a in ops]


def random_povm(d, M, rng, max_rank=None):
    return validate_povm(random_povm_elements(d, M, rng, max_rank))


def random_rank_one_povm(d, M, rng):
    """Rank-one elements from a random isometry; needs M >= d."""
    u = random_unitary(M, rng)[:, :d]
    return validate_povm([np.outer(u[k].conj(), u[k]) for k in range(M)])


def random_commuting_povm(d, M, rng):
    """Elements diagonal in a random basis with random stochastic weights."""
    w = rng.random((d, M)) ** 2
    w /= w.sum(axis=1, keepdims=True)
    u = random_unitary(d, rng)
    return validate_povm([u @ np.diag(w[:, k]) @ u.conj().T for k in range(M)])


def power_iteration_top(a, steps=10_000):
    """Largest eigenvalue of a Hermitian matrix via power iteration on a + c I."""
    a = np.asarray(a, dtype=complex)
    shift = np.abs(a).sum()
    b = a + shift * np.eye(len(a))
    v = np.ones(len(a), dtype=complex) / np.sqrt(len(a))
    for _ in range(steps):
        v = b @ v
        v /= np.linalg.norm(v)
    return float(np.vdot(v, a @ v).real)


def mutual_information_bits(P):
    """Plain-loop mutual information, independent of the package's implementation."""
    P = np.asarray(P, dtype=float)
    px, py = P.sum(axis=1), P.sum(axis=0)
    total = 0.0
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            if P[i, j] > 0:
                total += P[i, j] * np.log2(P[i, j] / (px[i] * py[j]))
    return total
