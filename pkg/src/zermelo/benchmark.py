"""Benchmark the integration kernels: numba backend vs pure-numpy fallback.

Run ``python -m zermelo.benchmark`` to time the current backend, or
``python -m zermelo.benchmark --compare`` to spawn one subprocess per
backend (the fallback is selected with ``ZERMELO_DISABLE_NUMBA=1``) and
print a speedup table.  Workloads exercise the two hot kernels: trajectory
integration with per-step storage and endpoint sampling on a time grid.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _workloads():
    from .flow import StepControl, integrate_numeric
    from .problems import ExtendedState, make_historical, make_vortex
    from .reachability import ShootingConfig, build_shooting_grid

    historical = make_historical()
    vortex = make_vortex(1.0)
    control = StepControl()

    def trajectories():
        for g0 in np.linspace(-3.0, 3.0, 48):
            integrate_numeric(historical, ExtendedState(0.0, 2.0, g0), 2.0, control)

    def vortex_grid():
        build_shooting_grid(
            vortex, (0.5, 0.0), ShootingConfig(n_alpha=96, n_time=120, t_max=1.5)
        )

    def near_singular():
        integrate_numeric(vortex, ExtendedState(0.2, 0.0, 3.14159), 0.25, control)

    return {
        "historical-trajectories-48x": trajectories,
        "vortex-shooting-grid-96x120": vortex_grid,
        "vortex-near-singular": near_singular,
    }


def run_current_backend() -> dict:
    from . import _kernels

    results = {"backend": _kernels.BACKEND, "timings": {}}
    loads = _workloads()
    for name, fn in loads.items():
        fn()  # warm up: jit compilation / caches
        t0 = time.perf_counter()
        fn()
        results["timings"][name] = time.perf_counter() - t0
    return results


def _run_subprocess(disable_numba: bool) -> dict:
    env = dict(os.environ)
    from ._kernels import NUMBA_ENV_FLAG

    env[NUMBA_ENV_FLAG] = "1" if disable_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-m", "zermelo.benchmark", "--json"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--compare", action="store_true", help="time both backends")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    args = parser.parse_args(argv)

    if not args.compare:
        results = run_current_backend()
        if args.json:
            print(json.dumps(results))
        else:
            print(f"backend: {results['backend']}")
            for name, seconds in results["timings"].items():
                print(f"  {name:32s} {seconds * 1e3:10.2f} ms")
        return 0

    fast = _run_subprocess(disable_numba=False)
    slow = _run_subprocess(disable_numba=True)
    print(f"{'workload':34s} {fast['backend']:>12s} {slow['backend']:>12s} {'speedup':>9s}")
    for name in fast["timings"]:
        t_fast = fast["timings"][name]
        t_slow = slow["timings"][name]
        ratio = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{name:34s} {t_fast * 1e3:10.2f}ms {t_slow * 1e3:10.2f}ms {ratio:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
