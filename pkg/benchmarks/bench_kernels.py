"""Time the compiled rate-statistics kernel against the numpy fallback.

    python benchmarks/bench_kernels.py [--samples 1000000] [--repeat 7]
"""
import argparse
import timeit

import numpy as np

from eekit import _kernels_py, kernels
from eekit.channel import Rayleigh


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args(argv)

    lam = Rayleigh().sample(args.samples, seed=0)
    mu = np.linspace(0.5, 1.5, lam.size)
    print(f"samples={args.samples} repeat={args.repeat} selected backend={kernels.BACKEND}")
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; timing the fallback only")
    for beta in (1e-6, 1.0, 144.27):
        for label, m in (("const", None), ("adapt", mu)):
            row = [f"beta={beta:<8g} {label}"]
            times = {}
            for name, fn in (("python", _kernels_py.rate_stats), ("compiled", kernels.rate_stats)):
                if name == "compiled" and kernels.BACKEND != "compiled":
                    continue
                t = min(timeit.repeat(lambda: fn(lam, 0.1, beta, m), number=1, repeat=args.repeat))
                times[name] = t
                row.append(f"{name} {t * 1e3:8.2f} ms")
            if len(times) == 2:
                row.append(f"speedup {times['python'] / times['compiled']:.2f}x")
            print("  ".join(row))


if __name__ == "__main__":
    main()
