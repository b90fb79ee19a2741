"""Compare the numba kernels with the pure-numpy fallback.

Times each grid kernel on frame-sized inputs for both backends, then runs a
few DC trials end to end under each backend (in a subprocess, so the
``RISKLAND_DISABLE_NUMBA`` switch takes effect at import).

    python3 benchmarks/bench_kernels.py [--repeat 20] [--trials 3]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from riskland import kernels
from riskland.expansion import gaussian_kernel1d

TRIAL_SNIPPET = """
import json, time
from riskland import kernels
from riskland.config import TrialConfig
from riskland.sim.templates import generate
from riskland.sim.trial import run_trial
scene = generate("park+road", 1)
run_trial(scene, TrialConfig().with_mode("DC", 999))  # warm-up (JIT compile)
t0 = time.perf_counter()
frames = 0
for seed in range({n}):
    frames += run_trial(scene, TrialConfig().with_mode("DC", seed)).frames
dt = time.perf_counter() - t0
print(json.dumps({{"backend": kernels.BACKEND, "s_per_trial": dt / {n}, "ms_per_frame": 1000 * dt / frames}}))
"""


def _inputs(rng):
    h, w = 121, 161
    img = rng.integers(0, 5, size=(h, w)).astype(np.uint8)
    A = np.array([[0.9, 0.1, 300.0], [-0.1, 0.9, 400.0]])
    Ai = np.ascontiguousarray(np.linalg.inv(np.vstack([A, [0, 0, 1]]))[:2])
    grid = rng.integers(0, 5, size=(1200, 1200)).astype(np.uint8)
    rects = np.array([[c, c + 40.0, r, r + 20.0] for c, r in rng.uniform(250, 450, size=(300, 2))])
    n, m = 300, 4
    times = np.tile(np.arange(m, dtype=float), n)
    xs, ys = rng.uniform(0, 60, size=n * m), rng.uniform(0, 60, size=n * m)
    starts, counts = np.arange(0, n * m, m, dtype=np.int64), np.full(n, m, dtype=np.int64)
    k = gaussian_kernel1d(5.0)
    return {
        "convolve_separable": lambda b: b.convolve_separable(img.astype(np.float64), k),
        "max_filter": lambda b: b.max_filter(img, 11),
        "sample_nearest": lambda b: b.sample_nearest(grid, grid.view(bool), False, A, h, w, np.uint8(2)),
        "accumulate_max": lambda b: b.accumulate_max(grid.copy(), np.zeros(grid.shape, bool), img, A, Ai,
                                                     280, 460, 380, 530),
        "paint_rects": lambda b: b.paint_rects(img.copy(), A, Ai, rects, np.full(len(rects), 6, np.uint8)),
        "argmin_tiebreak": lambda b: b.argmin_tiebreak(img.astype(np.float64), 80.0, 60.0),
        "interp_paths": lambda b: b.interp_paths(times, xs, ys, starts, counts, 1.7),
    }


def bench_kernels(repeat: int):
    backends = kernels.available_backends()
    cases = _inputs(np.random.default_rng(0))
    print(f"{'kernel':<20}" + "".join(f"{name + ' [ms]':>14}" for name in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        row = {}
        for bname, mod in backends.items():
            fn(mod)  # warm-up / compile
            row[bname] = 1000 * min(timeit.repeat(lambda: fn(mod), number=1, repeat=repeat))
        speed = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        print(f"{name:<20}" + "".join(f"{v:>14.3f}" for v in row.values()) + f"{speed:>9.1f}x")


def bench_trials(n: int):
    for disabled in ("1", "0"):
        env = dict(os.environ, RISKLAND_DISABLE_NUMBA=disabled)
        out = subprocess.run([sys.executable, "-c", TRIAL_SNIPPET.format(n=n)], env=env,
                             capture_output=True, text=True, check=True)
        r = json.loads(out.stdout.strip().splitlines()[-1])
        print(f"DC trial [{r['backend']:>5}]: {r['s_per_trial']:.3f} s/trial, {r['ms_per_frame']:.2f} ms/frame")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--trials", type=int, default=3, help="DC trials per backend (0 to skip)")
    args = ap.parse_args(argv)
    bench_kernels(args.repeat)
    if args.trials > 0:
        bench_trials(args.trials)


if __name__ == "__main__":
    main()
