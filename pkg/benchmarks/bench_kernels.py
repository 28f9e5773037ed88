"""Compiled vs numpy kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from qstability import _kernels_py as py
from qstability.quantum import depolarizing, lift_single_qubit_channel

try:
    from qstability import _kernels as cy
except ImportError:
    cy = None


def random_rho(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return np.ascontiguousarray(m / np.trace(m).real)


def cases(rng):
    for n in (1, 3, 5):
        dim = 2**n
        rho = random_rho(rng, dim)
        ops = np.ascontiguousarray(lift_single_qubit_channel(depolarizing(0.1), 0, n).kraus_ops)
        yield f"kraus_apply n={n}", lambda m, r=rho, o=ops: m.kraus_apply(r, o)
        yield f"local_depolarize n={n}", lambda m, r=rho, k=n: m.local_depolarize(r, 0.05, k)
    for n, batch in ((1, 10_000), (3, 2_000), (5, 200)):
        dim = 2**n
        rho = random_rho(rng, dim)
        eye = np.eye(dim, dtype=np.complex128)
        es = rng.exponential(1 / 40, size=batch)
        yield (
            f"depolarized_probabilities n={n} batch={batch}",
            lambda m, r=rho, b=eye, e=es, k=n: m.depolarized_probabilities(r, b, e, k, True),
        )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the numpy backend is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<44}{'numpy (ms)':>12}{'cython (ms)':>13}{'speedup':>9}")
    for name, fn in cases(rng):
        number = 20 if "batch" not in name else 1
        t_py = min(timeit.repeat(lambda: fn(py), number=number, repeat=args.repeat)) / number * 1e3
        if cy is None:
            print(f"{name:<44}{t_py:>12.3f}")
            continue
        assert np.allclose(fn(py), fn(cy), atol=1e-12)
        t_cy = min(timeit.repeat(lambda: fn(cy), number=number, repeat=args.repeat)) / number * 1e3
        print(f"{name:<44}{t_py:>12.3f}{t_cy:>13.3f}{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
