"""Time the array kernels with numba and with the numpy fallback.

    python3 benchmarks/bench_kernels.py --degree 3 --depth 10 --batch 16
"""

import argparse
import time

import numpy as np

from treeshift import kernels
from treeshift.norms import coefficient_matrix
from treeshift.tree import TreeSpec, TreeView


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--batch", type=int, default=16)
    ap.add_argument("--power", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    tree = TreeView(TreeSpec.homogeneous(args.degree))
    flat = tree.flat(args.depth)
    rng = np.random.default_rng(0)
    F = rng.integers(-9, 10, size=(args.batch, flat.size), dtype=np.int64)
    row_level = args.depth - args.power
    csr_level = min(row_level, 5)
    csr = coefficient_matrix(tree, flat, args.power, csr_level)
    Fp = kernels.derivative_dense(flat, F, use_numba=False)

    cases = {
        "derivative": lambda nb: kernels.derivative_dense(flat, F, nb),
        "backward_power": lambda nb: kernels.backward_power_dense(flat, F, args.power, nb),
        "row_l1": lambda nb: kernels.row_l1_dense(flat, args.power, row_level, nb),
        "csr_dot": lambda nb: kernels.csr_dot(*csr, Fp, use_numba=nb),
    }
    print(f"vertices={flat.size} batch={args.batch} power={args.power} numba={kernels.NUMBA_AVAILABLE}")
    print(f"{'kernel':<16}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for name, fn in cases.items():
        t_np, ref = best_of(lambda: fn(False), args.repeat)
        if kernels.NUMBA_AVAILABLE:
            fn(True)  # compile outside the timing
            t_nb, out = best_of(lambda: fn(True), args.repeat)
            assert np.array_equal(out, ref), name
            print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<16}{t_np:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
