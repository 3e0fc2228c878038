"""Compare the compiled kernels with the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py``. Each workload is timed with
``timeit`` on every available backend and the speedup of ``cython`` over
``numpy`` is printed when both are present.
"""
import argparse
import timeit

import numpy as np

from qdet._backend import available_backends
from qdet.bayes import min_error_cost, normalize_cost
from qdet.sic import sic_elements


def random_hermitian_stack(n, d, rng):
    a = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    return np.ascontiguousarray((a + np.conj(np.swapaxes(a, 1, 2))) / 2)


def workloads(rng):
    E = np.ascontiguousarray(sic_elements(0.7))
    B = np.ascontiguousarray(normalize_cost(min_error_cost(4))[0])
    W = rng.dirichlet(np.ones(16), size=9)
    r0 = np.full(9, 1 / 9)
    stack = random_hermitian_stack(2000, 4, rng)
    single = random_hermitian_stack(1, 8, rng)[0]
    return {
        "jacobi_eigh 8x8": lambda k: k.jacobi_eigh(single),
        "eigvalsh_batch 2000 x 4x4": lambda k: k.eigvalsh_batch(stack),
        "grouping_scores SIC, N=4 (256)": lambda k: k.grouping_scores(E, B, 0, 4**4),
        "unambiguous_scores SIC, N=3 (256)": lambda k: k.unambiguous_scores(E, 3, 0, 4**4),
        "blahut_arimoto 9x16": lambda k: k.blahut_arimoto(W, r0, 1e-13, 200000),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = available_backends()
    jobs = workloads(np.random.default_rng(0))
    names = sorted(backends)
    print(f"{'workload':36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, job in jobs.items():
        times = {}
        for name in names:
            kernel = backends[name]
            number = max(1, int(0.2 / max(timeit.timeit(lambda: job(kernel), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: job(kernel), number=number, repeat=args.repeat)) / number
            times[name] = best
        row = f"{label:36s}" + "".join(f"{times[n] * 1e3:10.3f}ms" for n in names)
        if "cython" in times and "numpy" in times:
            row += f"{times['numpy'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
