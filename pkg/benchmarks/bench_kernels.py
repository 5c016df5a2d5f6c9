"""Wall-clock comparison of the compiled and pure-Python reachability kernels.

Usage: python benchmarks/bench_kernels.py [--d 8 16 32] [--queries 200]
"""
import argparse
import time

import numpy as np

from dmgwalk._kernels import _pure

try:
    from dmgwalk._kernels import _fast
except ImportError:
    _fast = None

from dmgwalk.testbench import random_graph


def _workload(d, n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        g = random_graph(d, "canonical", 3.0 / d, rng)
        j, k = rng.choice(d, 2, replace=False)
        src = np.zeros(d, np.uint8)
        tgt = np.zeros(d, np.uint8)
        src[j] = tgt[k] = 1
        cond = (rng.random(d) < 0.3).astype(np.uint8)
        cond[j] = cond[k] = 0
        out.append((g.D, g.B, src, tgt, cond))
    return out


def _time(fn, work):
    t0 = time.perf_counter()
    for args in work:
        fn(*args)
    return time.perf_counter() - t0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--d", type=int, nargs="+", default=[8, 16, 32, 64])
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    backends = [("pure", _pure)] + ([("cython", _fast)] if _fast is not None else [])
    print(f"{'d':>4} {'kernel':>8} " + " ".join(f"{name:>10}" for name, _ in backends))
    for d in args.d:
        work = _workload(d, args.queries, args.seed)
        for kname in ("mixed", "trek"):
            row = []
            for _, mod in backends:
                if kname == "mixed":
                    fn = lambda D, B, s, t, c, m=mod: m.mixed_reach(D, B, s, t, c, False, True)  # noqa: E731
                else:
                    fn = mod.trek_reach
                row.append(_time(fn, work))
            print(f"{d:>4} {kname:>8} " + " ".join(f"{x * 1e3:>8.1f}ms" for x in row))


if __name__ == "__main__":
    main()
