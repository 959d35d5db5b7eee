"""Compare the compiled and pure-Python selection kernels.

    python benchmarks/bench_kernels.py [--sizes 100,300,1000] [--repeat 3]

Reports the best-of-N wall time for the raw kernel on an n x n key matrix
(n steps, one column per step) and for a full simulation where every task
arrives at t=0 with a replenished pool, which makes the single planning
round an n x n max-min pass.
"""

import argparse
import time

import numpy as np

from nbdmmm import kernels
from nbdmmm.schedulers import SchedulerKind
from nbdmmm.simulator import FleetSpec, ScenarioConfig, WorkloadSpec, run


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,300,1000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the Python fallback is timed")

    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in sizes:
        keys = np.random.default_rng(n).random((n, n))
        cols = np.arange(n, dtype=np.intp)
        times = [best_of(lambda b=b: kernels.pick_sequence(keys, cols, backend=b), args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{'kernel ' + str(n) + 'x' + str(n):<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)

    for n in sizes:
        cfg = ScenarioConfig(fleet=FleetSpec(hosts=20), replenish=True, scheduler=SchedulerKind.NBDMMM,
                             workload=WorkloadSpec(task_count=n, arrival_interval_ms=0))
        times = [best_of(lambda b=b: run(cfg, backend=b), args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{'simulate ' + str(n) + ' tasks':<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
