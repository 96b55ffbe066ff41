"""Time the compiled and numpy kernels on the same circuits.

    python3 benchmarks/bench_kernels.py [--repeats N]
"""
import argparse
import timeit

import numpy as np

from seedsynth import _kernels_py
from seedsynth.linalg import random_unitary
from seedsynth.templates import enumerate_templates

try:
    from seedsynth import _kernels as compiled
except ImportError:
    compiled = None


def cases():
    cat = enumerate_templates(3, 8)
    rng = np.random.default_rng(0)
    for depth in (0, 2, 4, 8):
        t = next(t for t in cat.templates if t.cnot_count == depth)
        sk = t.skeleton
        yield f"3q/{depth}cx", sk, rng.uniform(-np.pi, np.pi, sk.num_params), random_unitary(3, depth)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    print(f"{'case':<10} {'kernel':<10} " + " ".join(f"{name + ' us':>12}" for name, _ in backends) + "   speedup")
    for label, sk, params, target in cases():
        for kernel in ("unitary", "cost_grad"):
            times = []
            for _, impl in backends:
                fn = getattr(impl, kernel)
                call = (lambda: fn(3, sk.ops, params)) if kernel == "unitary" else \
                    (lambda: fn(3, sk.ops, params, target))
                call()
                times.append(min(timeit.repeat(call, number=args.repeats, repeat=3)) / args.repeats * 1e6)
            speed = f"{times[0] / times[1]:9.1f}x" if len(times) > 1 else ""
            print(f"{label:<10} {kernel:<10} " + " ".join(f"{t:12.1f}" for t in times) + "  " + speed)
    if compiled is None:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
