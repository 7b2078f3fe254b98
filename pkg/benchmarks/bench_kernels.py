"""Time the compiled and numpy kernel backends on the same inputs.

Usage: python benchmarks/bench_kernels.py [--qubits 4 8 12 16] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from eqsim import _kernels_py

try:
    from eqsim import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _cases(n, rng):
    x, z = int(rng.integers(1, 2**n)), int(rng.integers(0, 2**n))
    n_y = bin(x & z).count("1")
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    cases = {
        "rotate_vec": lambda impl: impl.rotate_vec(psi, x, z, n_y, 0.1),
        "expect_vec": lambda impl: impl.expect_vec(psi, x, z, n_y),
    }
    if n <= 10:
        rho = np.outer(psi, psi.conj())
        cases["rotate_dm"] = lambda impl: impl.rotate_dm(rho, x, z, n_y, 0.1)
        cases["expect_dm"] = lambda impl: impl.expect_dm(rho, x, z, n_y)
        cases["depolarize"] = lambda impl: impl.depolarize(rho, 0.999)
    return cases


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 10, 16])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if _kernels_c is None:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'qubits':>7}{'python [us]':>14}{'cython [us]':>14}{'speedup':>9}")
    for n in args.qubits:
        for name, fn in _cases(n, rng).items():
            t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=args.repeat, repeat=3)) / args.repeat
            if _kernels_c is None:
                print(f"{name:<12}{n:>7}{t_py * 1e6:>14.1f}{'-':>14}{'-':>9}")
                continue
            t_c = min(timeit.repeat(lambda: fn(_kernels_c), number=args.repeat, repeat=3)) / args.repeat
            print(f"{name:<12}{n:>7}{t_py * 1e6:>14.1f}{t_c * 1e6:>14.1f}{t_py / t_c:>9.1f}")


if __name__ == "__main__":
    main()
