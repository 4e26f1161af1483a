"""Compare the compiled and numpy kernels on identical inputs.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are imported
directly, so the environment switch ``COLLARBOUND_PURE_PYTHON`` has no effect
here. The script also checks that the two backends agree.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from collarbound._kernels import _pykernels

try:
    from collarbound._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _interior_points(m, axes, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(4 * m, len(axes))) * axes
    X = X[(X**2 / axes**2).sum(axis=1) < 1.0]
    return np.ascontiguousarray(X[:m])


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=100_000, help="projection batch size")
    parser.add_argument("--pool", type=int, default=20_000, help="packing pool size")
    parser.add_argument("--eps", type=float, default=0.05)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    axes = np.array([1.0, 0.9, 0.9])
    X = _interior_points(args.points, axes, 0)
    rng = np.random.default_rng(1)
    pool = rng.uniform(-1.0, 1.0, size=(args.pool, 2))
    pool = np.ascontiguousarray(pool[(pool**2).sum(axis=1) <= 1.0])

    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    rows = []
    out = {}
    for name, mod in backends.items():
        t_proj = _time(lambda mod=mod: mod.ellipsoid_project(X, axes), args.repeat)
        t_pack = _time(lambda mod=mod: mod.greedy_pack(pool, args.eps, False), args.repeat)
        out[name] = (mod.ellipsoid_project(X, axes), mod.greedy_pack(pool, args.eps, False))
        rows.append((name, t_proj, t_pack))

    print(f"ellipsoid_project: {len(X)} points; greedy_pack: {len(pool)} points, eps={args.eps}")
    print(f"{'backend':<8} {'project [s]':>12} {'pack [s]':>10}")
    for name, a, b in rows:
        print(f"{name:<8} {a:12.4f} {b:10.4f}")
    if "cython" in out:
        base = {r[0]: r for r in rows}
        print(f"speedup  {base['numpy'][1] / base['cython'][1]:12.1f}x "
              f"{base['numpy'][2] / base['cython'][2]:9.1f}x")
        (r_py, _, _), keep_py = out["numpy"]
        (r_cy, _, _), keep_cy = out["cython"]
        print(f"max |rho difference| = {np.abs(r_py - r_cy).max():.2e}; "
              f"identical packings: {np.array_equal(keep_py, keep_cy)}")
    else:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
