"""Timing comparison of the two compute backends.

Runs the same workloads once under SEECR_BACKEND=numba and once under
SEECR_BACKEND=numpy, each in a fresh subprocess so the flag is honored at
import time. The jitted path pays a one-time compilation cost (cached on
disk after the first process), so warm numbers are reported separately.

Usage: python benchmarks/bench_backends.py [--trials N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, time
import numpy as np

from seecr.backend import BACKEND
from seecr.harness import sample_channels
from seecr.model import SystemParams
from seecr.optimizer import maximize_see
from seecr.oracle import GridSpec, grid_search
from seecr.hermitian import eig_hermitian

trials = int(os.environ["BENCH_TRIALS"])

out = {"backend": BACKEND}

# one-time warmup (JIT compilation under numba; no-op under numpy)
pr2 = SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=10 ** 1.3)
t0 = time.perf_counter()
maximize_see(sample_channels(0, 0, 2), pr2, run_certification=False)
grid_search(sample_channels(0, 0, 2), pr2,
            grid=GridSpec(theta_steps=4, phi_steps=4, power_steps=5,
                          mix_steps=2, refine_passes=0))
out["warmup_s"] = time.perf_counter() - t0

# eigendecomposition kernel
rng = np.random.default_rng(1)
mats = []
for _ in range(200):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    mats.append(0.5 * (a + a.conj().T))
t0 = time.perf_counter()
for a in mats:
    eig_hermitian(a)
out["eig_3x3_us"] = (time.perf_counter() - t0) / len(mats) * 1e6

# full ratio maximization, three antennas
pr3 = SystemParams(n_t=3, r_d=0.5, e_s=1.0, p_tx=10 ** 1.3)
solved = 0
t0 = time.perf_counter()
for trial in range(trials):
    sol = maximize_see(sample_channels(7, trial, 3), pr3,
                       run_certification=False)
    solved += sol.status == "Optimal"
out["solve_n3_ms"] = (time.perf_counter() - t0) / trials * 1e3
out["solve_n3_feasible"] = solved

# exhaustive reference scan, two antennas
t0 = time.perf_counter()
for trial in range(max(1, trials // 4)):
    grid_search(sample_channels(8, trial, 2), pr2,
                grid=GridSpec(refine_passes=1))
out["grid_scan_ms"] = (time.perf_counter() - t0) / max(1, trials // 4) * 1e3

print(json.dumps(out))
"""


def run_backend(backend, trials):
    env = dict(os.environ, SEECR_BACKEND=backend, BENCH_TRIALS=str(trials))
    proc = subprocess.run([sys.executable, "-c", WORKER], env=env,
                          capture_output=True, text=True, timeout=3600)
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} worker failed:\n{proc.stderr}")
    return json.loads(proc.stdout.splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20,
                    help="solver instances per backend (default 20)")
    args = ap.parse_args()

    results = [run_backend(b, args.trials) for b in ("numba", "numpy")]
    print(f"{'metric':<22}" + "".join(f"{r['backend']:>14}" for r in results))
    rows = (("warmup_s", "{:.2f}"), ("eig_3x3_us", "{:.1f}"),
            ("solve_n3_ms", "{:.2f}"), ("grid_scan_ms", "{:.1f}"))
    for key, fmt in rows:
        line = f"{key:<22}"
        for r in results:
            line += f"{fmt.format(r[key]):>14}"
        print(line)
    a, b = results
    print(f"\nsolver speedup (numpy/numba): "
          f"{b['solve_n3_ms'] / a['solve_n3_ms']:.1f}x; "
          f"grid scan: {b['grid_scan_ms'] / a['grid_scan_ms']:.1f}x")


if __name__ == "__main__":
    main()
