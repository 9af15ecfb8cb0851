"""Compare the numba kernels with the pure-numpy fallbacks.

Run ``python benchmarks/bench_kernels.py``; the first numba call per kernel
includes compilation and is excluded by a warm-up.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from garlat import _kernels
from garlat.garside import GarsideLattice, braid_germ
from garlat.zaction import ZnLattice, build_lattice_ball, build_quotient_ball


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    g = build_quotient_ball(ZnLattice(4), radius=4)
    b = build_lattice_ball(GarsideLattice(braid_germ(3)), radius=4)
    rng = np.random.default_rng(0)
    mats = [rng.integers(0, 2, (24, 48)) for _ in range(50)]
    for name, graph in (("Z4 quotient r4", g), ("B3 lattice r4", b)):
        src = np.arange(len(graph))
        dist = graph.dist_from(0)
        top = int(dist.max())
        yield f"bfs all-pairs  {name} ({len(graph)})", lambda u, G=graph, s=src: _kernels.bfs_rows(G.indptr, G.indices, s, u)
        yield f"tc scan        {name}", lambda u, G=graph, d=dist, t=top: _kernels.tc_scan(G.indptr, G.indices, d, t, u)
        yield f"qc scan        {name}", lambda u, G=graph, d=dist, t=top: _kernels.qc_scan(G.indptr, G.indices, d, t, u)
    yield "rref mod 2     50 x (24x48)", lambda u: [_kernels.rref_mod_p(m, 2, u) for m in mats]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    print(f"{'kernel':<40} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for label, fn in cases():
        t_np = _time(lambda: fn(False), args.repeat)
        if _kernels.HAVE_NUMBA:
            fn(True)
            t_nb = _time(lambda: fn(True), args.repeat)
            print(f"{label:<40} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}")
        else:
            print(f"{label:<40} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
