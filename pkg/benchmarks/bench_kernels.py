"""Benchmark the numba fast path of each hot kernel against the pure-numpy
reference, and confirm both paths agree numerically.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    GPDISC_NO_NUMBA=1 python3 benchmarks/bench_kernels.py   # numpy path only

The workload mirrors the heaviest real call sites: a 256x512 polar grid
worth of nodes against a disc-filling vortex lattice (phase kernels), and
one preconditioner application's worth of batched tridiagonal solves.
"""

import argparse
import time

import numpy as np

from gpdisc import make_grid
from gpdisc._kernels import (
    HAS_NUMBA,
    nearest_distance_nb,
    nearest_distance_np,
    numba_enabled,
    phase_grad_sq_nb,
    phase_grad_sq_np,
    phase_product_nb,
    phase_product_np,
    thomas_batched_nb,
    thomas_batched_np,
)


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def site_lattice(spacing):
    """Square lattice covering the unit disc, origin included."""
    k = int(1.0 / spacing) + 1
    axis = spacing * np.arange(-k, k + 1, dtype=float)
    px, py = np.meshgrid(axis, axis, indexing="ij")
    keep = px * px + py * py < (1.0 - spacing) ** 2
    return px[keep].ravel(), py[keep].ravel()


def workloads(n_r, n_theta, spacing, seed):
    grid = make_grid(n_r, n_theta)
    x, y = grid.x.ravel(), grid.y.ravel()
    px, py = site_lattice(spacing)
    rng = np.random.default_rng(seed)
    lower = np.full(n_r - 1, -1.0)
    upper = np.full(n_r - 1, -1.0)
    diag = 4.0 + rng.random((n_r, n_theta))
    rhs = rng.standard_normal((n_r, n_theta)) + 1j * rng.standard_normal((n_r, n_theta))
    return {
        "phase_product": (phase_product_np, phase_product_nb, (x, y, px, py)),
        "nearest_distance": (nearest_distance_np, nearest_distance_nb, (x, y, px, py)),
        "phase_grad_sq": (phase_grad_sq_np, phase_grad_sq_nb, (x, y, px, py)),
        "thomas_batched": (thomas_batched_np, thomas_batched_nb, (lower, diag, upper, rhs)),
    }, px.size


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nr", type=int, default=256)
    parser.add_argument("--ntheta", type=int, default=512)
    parser.add_argument("--spacing", type=float, default=0.11, help="lattice site spacing")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    table, n_sites = workloads(args.nr, args.ntheta, args.spacing, args.seed)
    nodes = args.nr * args.ntheta
    print(f"nodes={nodes} sites={n_sites} repeats={args.repeats} "
          f"numba={'on' if numba_enabled() else 'off'}")
    header = f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}{'max|diff|':>12}"
    print(header)
    print("-" * len(header))
    for name, (fn_np, fn_nb, work) in table.items():
        t_np, ref = best_of(fn_np, work, args.repeats)
        if HAS_NUMBA and numba_enabled():
            fn_nb(*work)  # warm-up triggers the JIT compile
            t_nb, out = best_of(fn_nb, work, args.repeats)
            diff = float(np.max(np.abs(out - ref)))
            print(f"{name:<18}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}"
                  f"{t_np / t_nb:>9.1f}{diff:>12.2e}")
        else:
            print(f"{name:<18}{1e3 * t_np:>12.2f}{'-':>12}{'-':>9}{'-':>12}")


if __name__ == "__main__":
    main()
