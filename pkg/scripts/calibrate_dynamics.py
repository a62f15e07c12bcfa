#!/usr/bin/env python3
"""Calibrate the default bending constant.

Solves k_bend so the package's persistence-length estimator (equilibrium
crankshaft/Langevin sampling, short-lag tangent-correlation fit) reads
10 sigma, then prints the value to pin as DEFAULT_K_BEND in dynamics.py.
The estimator convention absorbs excluded-volume swelling, so the result
sits below the ideal worm-like-chain guess k = lp * T / bond.
"""

import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from knotsteer.dynamics import ChainParams, measure_persistence_length

TARGET = 10.0
SEEDS = (1, 2)
SAMPLES = 1300
# last run: k_bend=9.8 -> lp 9.97, 10.17 (seeds 1, 2); pinned 9.8


def measure(k: float) -> float:
    vals = [measure_persistence_length(ChainParams(k_bend=k), n=100,
                                       n_samples=SAMPLES, seed=s)
            for s in SEEDS]
    return float(np.mean(vals)), vals


def main() -> None:
    t0 = time.time()
    history = []
    k = 9.5
    for step in range(5):
        lp, vals = measure(k)
        history.append((k, lp))
        print(f"k_bend={k:.3f}: lp={lp:.2f} (seeds {['%.2f' % v for v in vals]}) "
              f"[{time.time()-t0:.0f}s]", flush=True)
        if abs(lp - TARGET) < 0.25:
            break
        if len(history) >= 2 and abs(history[-1][1] - history[-2][1]) > 1e-9:
            (k0, l0), (k1, l1) = history[-2], history[-1]
            k = max(1.0, k1 + (TARGET - l1) * (k1 - k0) / (l1 - l0))
        else:
            k *= TARGET / lp
    print(f"=> pin DEFAULT_K_BEND = {history[-1][0]:.2f} "
          f"(measured lp {history[-1][1]:.2f} sigma)")


if __name__ == "__main__":
    main()
