"""Time the GRU recurrence kernels (forward + backward) on each available backend.

    python3 benchmarks/bench_gru.py [--length 30] [--hidden 25] [--repeat 200]
"""

import argparse
import timeit

import numpy as np

from absa.nn import kernels


def make_case(length, hidden, seed=0):
    rng = np.random.default_rng(seed)
    xp = rng.normal(size=(length, 3 * hidden))
    U = rng.normal(scale=0.3, size=(3 * hidden, hidden))
    h0 = np.zeros(hidden)
    dhs = rng.normal(size=(length, hidden))
    return xp, U, h0, dhs


def run_once(impl, xp, U, h0, dhs):
    hs, zs, rs, cs = kernels.gru_forward(xp, U, h0, impl=impl)
    return kernels.gru_backward(dhs, U, h0, hs, zs, rs, cs, impl=impl)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=30, help="tokens per sequence")
    ap.add_argument("--hidden", type=int, default=25)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    case = make_case(args.length, args.hidden)
    backends = kernels.available_backends()
    print(f"sequence length {args.length}, hidden {args.hidden}, {args.repeat} forward+backward passes")
    times = {}
    for name, impl in sorted(backends.items()):
        run_once(impl, *case)
        best = min(timeit.repeat(lambda: run_once(impl, *case), number=args.repeat, repeat=3))
        times[name] = best / args.repeat
        print(f"  {name:9s} {times[name] * 1e6:9.1f} us/pass")
    if len(times) == 2:
        ref = run_once(backends["python"], *case)
        got = run_once(backends["compiled"], *case)
        diff = max(float(np.abs(a - b).max()) for a, b in zip(ref, got))
        print(f"  speedup   {times['python'] / times['compiled']:9.1f}x  (max abs difference {diff:.1e})")
    else:
        print("  compiled extension not built; only the numpy fallback is available")


if __name__ == "__main__":
    main()
