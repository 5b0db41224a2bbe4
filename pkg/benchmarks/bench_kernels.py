"""Time the numba and pure-numpy kernel paths side by side.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from pirac import kernels
from pirac.covercode import _span_table, hamming_parity, extended_hamming_parity


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    ham5 = np.array(hamming_parity(5).column_ints(), dtype=np.int64)
    rng = np.random.default_rng(0)
    wide = rng.integers(1, 1 << 12, size=24, dtype=np.int64)
    extra = rng.integers(0, 1 << 6, size=(4096, 7), dtype=np.int64)
    member, span_k = _span_table(extended_hamming_parity(3))
    return [
        ("leader_table  ham(5), r=5", kernels.leader_table_nb, kernels.leader_table_np, (ham5, 5)),
        ("leader_table  24 cols, r=12", kernels.leader_table_nb, kernels.leader_table_np, (wide, 12)),
        ("coset_weights 24 cols, r=12", kernels.coset_weights_nb, kernels.coset_weights_np, (wide, 12, 24)),
        ("first_covering 4096x7, r=6, R=2", kernels.first_covering_nb, kernels.first_covering_np, (extra, 6, 2)),
        ("max_tau       ext-ham(3), tau=3", kernels.max_tau_nb, kernels.max_tau_np, (member, span_k, 3)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':36s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, nb, npf, argv in cases():
        nb(*argv)  # compile outside the timing
        a, b = nb(*argv), npf(*argv)
        same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
        t_nb = best_of(lambda: nb(*argv), args.repeat)
        t_np = best_of(lambda: npf(*argv), args.repeat)
        flag = "" if same else "  MISMATCH"
        print(f"{name:36s} {t_nb:10.5f} {t_np:10.5f} {t_np / max(t_nb, 1e-9):7.1f}x{flag}")


if __name__ == "__main__":
    main()
