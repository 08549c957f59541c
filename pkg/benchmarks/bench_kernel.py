"""Compiled vs numpy Monte Carlo kernel: rounds per second, same tallies.

    python benchmarks/bench_kernel.py [--rounds N] [--repeat K]
"""

import argparse
import time

from pmqkd.channel import ChannelConfig, SystemParams
from pmqkd.sim import Mode, ProtocolConfig, _fallback, simulate

try:
    from pmqkd.sim import _kernel
except ImportError:
    _kernel = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = [("numpy", _fallback.run_block)]
    if _kernel is not None:
        backends.insert(0, ("cython", _kernel.run_block))
    else:
        print("compiled kernel not built; numpy only")

    for mode in Mode:
        cfg = ProtocolConfig(
            params=SystemParams(intensity=0.5), channel=ChannelConfig(20.0), mode=mode, n_rounds=args.rounds, seed=1
        )
        tallies = {}
        for name, block in backends:
            dt, tally = best_of(lambda: simulate(cfg, block=block), args.repeat)
            tallies[name] = tally
            print(f"{mode.value:>12} {name:>6}: {dt:7.3f} s  {args.rounds / dt / 1e6:7.2f} M rounds/s")
        if len(tallies) == 2:
            same = tallies["cython"] == tallies["numpy"]
            print(f"{'':>12} tallies identical: {same}")


if __name__ == "__main__":
    main()
