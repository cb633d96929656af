"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``. Each kernel is
called once before timing so compilation is excluded. The library picks the
numba path unless ``UFINSLER_DISABLE_NUMBA`` is set; this script calls both
variants explicitly, so the variable has no effect here.
"""

import argparse
import timeit

import numpy as np

from ufinsler import linalg
from ufinsler.dynamics import chord_invariants_numba, chord_invariants_numpy
from ufinsler.geometry import random_unitary
from ufinsler.tensors import convexity_combos_numba, convexity_combos_numpy


def _cases(rng):
    k = 200_000
    t = rng.uniform(0, 2, k)
    s = t * rng.uniform(0, 1, k)
    combo_args = (rng.uniform(0.5, 2, k), rng.standard_normal(k), rng.standard_normal(k), t, s)

    a = rng.standard_normal((500, 6, 6))
    stack = a + a.transpose(0, 2, 1)

    g = rng.standard_normal((8, 8)) + 8 * np.eye(8)

    z = np.zeros(3, complex)
    z[0] = 1.0
    w = random_unitary(3, seed=1) @ np.array([0.0, 1.0, 0.0], complex)

    return [
        ("convexity_combos, 2e5 cells", convexity_combos_numba, convexity_combos_numpy, combo_args),
        ("jacobi batch, 500 x (6x6)", linalg.jacobi_eigvalsh_batch_numba, linalg.jacobi_eigvalsh_batch_numpy,
         (stack,)),
        ("gauss-jordan, 8x8", linalg.gauss_jordan_inverse_numba, linalg.gauss_jordan_inverse_numpy, (g,)),
        ("chord invariants, m=1e5", chord_invariants_numba, chord_invariants_numpy, (z, w, 1.2, 100_000)),
    ]


def _best(fn, args, repeat):
    fn(*args)
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>9s}")
    for name, fast, slow, fargs in _cases(rng):
        a, b = fast(*fargs), slow(*fargs)
        for x, y in (zip(a, b) if isinstance(a, tuple) else [(a, b)]):
            # Jacobi returns eigenvalues unsorted
            assert np.allclose(np.sort(x, axis=-1), np.sort(y, axis=-1), rtol=1e-10, atol=1e-10), name
        tf, ts = _best(fast, fargs, args.repeat), _best(slow, fargs, args.repeat)
        print(f"{name:32s} {1e3 * tf:12.3f} {1e3 * ts:12.3f} {ts / tf:8.1f}x")


if __name__ == "__main__":
    main()
