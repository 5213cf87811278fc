"""Compare the numba and pure-numpy kernel paths.

Usage:
  python benchmarks/bench_kernels.py [--repeat 200] [--sizes 4 8 16 32]

Both paths are always importable, so one process times both. The numba path
is warmed up (compiled) before timing. With ``GVBS_DISABLE_JIT=1`` the
"numba" column runs the same loop code in the interpreter.
"""

import argparse
import time

import numpy as np

from gvbs import _kernels
from gvbs.building_block import StandardFormParams, standard_form_cm


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def report(name, t_np, t_nb, err):
    print(f"{name:<28s} numpy {t_np * 1e6:10.1f} us   numba {t_nb * 1e6:10.1f} us   speedup {t_np / t_nb:6.2f}x   max|diff| {err:.1e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--batch", type=int, default=2000, help="reductions per batched call")
    args = ap.parse_args()

    print(f"backend in use: {_kernels.BACKEND}")
    block = standard_form_cm(StandardFormParams(2.0, 3.0)).data

    # warm up so compile time is not counted
    _kernels.ring_schur_numba(block, 3, 1.0)
    _kernels.ring_schur_epr_numba(block, 3)

    for n in args.sizes:
        a, _ = _kernels.ring_schur_numpy(block, n, 3.0)
        b, _ = _kernels.ring_schur_numba(block, n, 3.0)
        report(
            f"ring_schur N={n}",
            best_of(lambda: _kernels.ring_schur_numpy(block, n, 3.0), args.repeat),
            best_of(lambda: _kernels.ring_schur_numba(block, n, 3.0), args.repeat),
            float(np.max(np.abs(a - b))),
        )
        a, _ = _kernels.ring_schur_epr_numpy(block, n)
        b, _ = _kernels.ring_schur_epr_numba(block, n)
        report(
            f"ring_schur_epr N={n}",
            best_of(lambda: _kernels.ring_schur_epr_numpy(block, n), args.repeat),
            best_of(lambda: _kernels.ring_schur_epr_numba(block, n), args.repeat),
            float(np.max(np.abs(a - b))),
        )

    rng = np.random.default_rng(0)
    m = rng.normal(size=(args.batch, 4, 4))
    stack = m @ np.swapaxes(m, 1, 2) + 1.5 * np.eye(4)
    gin = np.eye(2)
    _kernels.pt_nu_minus_numba(stack[:2])
    _kernels.teleport_fidelity_numba(stack[:2], gin)
    report(
        f"pt_nu_minus batch={args.batch}",
        best_of(lambda: _kernels.pt_nu_minus_numpy(stack), args.repeat),
        best_of(lambda: _kernels.pt_nu_minus_numba(stack), args.repeat),
        float(np.max(np.abs(_kernels.pt_nu_minus_numpy(stack) - _kernels.pt_nu_minus_numba(stack)))),
    )
    report(
        f"teleport_fidelity batch={args.batch}",
        best_of(lambda: _kernels.teleport_fidelity_numpy(stack, gin), args.repeat),
        best_of(lambda: _kernels.teleport_fidelity_numba(stack, gin), args.repeat),
        float(np.max(np.abs(_kernels.teleport_fidelity_numpy(stack, gin) - _kernels.teleport_fidelity_numba(stack, gin)))),
    )


if __name__ == "__main__":
    main()
