"""Compare the compiled trial loop against the pure-numpy fallback.

Each backend runs in its own subprocess so the EQR_NUMBA switch is applied
before the kernels module is imported.  The workload is a fixed-seed
campaign over all three symmetries; one warm-up campaign absorbs JIT
compilation before timing starts.

    python3 benchmarks/bench_backends.py [--trials N] [--repeats K]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys


def worker(trials, repeats):
    import time

    from eqr import kernels
    from eqr.sim import SimConfig, run_campaign

    cfg = SimConfig(trajectory="lissajous", trials=trials, process_std=0.1, seed=0)
    run_campaign(SimConfig(trajectory="lissajous", trials=2, process_std=0.1))
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_campaign(cfg)
        times.append(time.perf_counter() - t0)
    print(json.dumps({"numba": kernels.NUMBA_ENABLED, "times": times}))


def launch(backend, args):
    env = dict(os.environ, EQR_NUMBA="1" if backend == "numba" else "0")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--trials", str(args.trials), "--repeats", str(args.repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    payload = json.loads(out.stdout.splitlines()[-1])
    assert payload["numba"] == (backend == "numba"), "backend switch ignored"
    return payload["times"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=8)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        worker(args.trials, args.repeats)
        return

    print("campaign: lissajous, %d trials, 3 symmetries, %d repeats"
          % (args.trials, args.repeats))
    results = {}
    for backend in ("numba", "numpy"):
        times = launch(backend, args)
        mean = statistics.mean(times)
        std = statistics.stdev(times) if len(times) > 1 else 0.0
        results[backend] = mean
        print("%-6s  %8.3f s  +/- %6.3f s   %s"
              % (backend, mean, std, "  ".join("%.3f" % t for t in times)))
    print("speedup: %.1fx" % (results["numpy"] / results["numba"]))


if __name__ == "__main__":
    main()
