"""Time the compiled and NumPy kernel backends on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from ethf import kernels
from ethf.random_fock import build_sector, sample_haar_vector


def cases():
    sector = build_sector(16, 8)
    psi = sample_haar_vector(sector.dim, 7)
    full = np.zeros(1 << 14)
    full[0] = 1.0
    coeffs = np.random.default_rng(7).standard_normal(14)
    yield "sector_correlation N=16 Np=8", lambda k: k.sector_correlation(sector.basis, psi, 16, -1)
    yield "sector_hopping N=16 Np=8", lambda k: k.sector_hopping(sector.basis, 3, 11, -1)
    yield "apply_creation N=14", lambda k: k.apply_creation(full, coeffs, 14, -1)
    yield "reorder_signs N=16", lambda k: k.reorder_signs(16, 0b1010101010101010, -1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = kernels.available_backends()
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    print(f"{'kernel':32s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        times = {}
        for n in names:
            mod = kernels.get_backend(n)
            fn(mod)  # warm-up
            times[n] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:32s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
