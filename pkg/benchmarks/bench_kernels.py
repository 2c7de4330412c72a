"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Reports the best wall time of each kernel on both backends and checks that
their outputs agree.
"""
import argparse
import time

import numpy as np

from fracosc import _kernels_py
from fracosc.subordination import default_tau_step

try:
    from fracosc import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(1)
    for n in (4096, 65536):
        c, x = rng.normal(size=n), rng.normal(size=n)
        yield f"causal_conv n={n}", lambda k, c=c, x=x: k.causal_conv(c, x)
    t = np.array([1.0, 5.0, 10.0])
    for alpha in (1.5, 1.8):
        beta = alpha / 2
        tau = default_tau_step(beta, t[-1])
        yield (f"hitting_times alpha={alpha} paths=10000",
               lambda k, b=beta, s=tau: k.hitting_times(b, s, t, 7, 0, 10000, 1))
    key = _kernels_py.path_key(3, 0)
    yield "stable_draws n=10^6", lambda k: k.stable_draws(0.75, key, 0, 10 ** 6)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels are not built; only the fallback is timed")
    print(f"{'kernel':42s} {'compiled [s]':>13s} {'numpy [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases():
        tp, outp = best(lambda: fn(_kernels_py), args.repeat)
        if compiled is None:
            print(f"{name:42s} {'-':>13s} {tp:11.4f}")
            continue
        tc, outc = best(lambda: fn(compiled), args.repeat)
        outc, outp = np.asarray(outc), np.asarray(outp)
        diff = float(np.max(np.abs(outc - outp) / np.maximum(np.abs(outp), 1e-300)))
        print(f"{name:42s} {tc:13.4f} {tp:11.4f} {tp / tc:8.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()
