#!/usr/bin/env python3
"""Generate the bundled curve assets.

* deep_trefoil_38.xyz — a 38-bead chain with a tight trefoil centred in it,
  relaxed to the bead-spring model's equilibrium bond length; the starting
  configuration for directed unknotting runs.
* equilibrated_52.xyz — a 52-bead semiflexible chain thermalised at T = 1;
  the starting configuration for directed knotting runs.
* slipknot.xyz — a hairpin fed through a trefoil: the knotted subchain is
  deep while the whole curve pulls free.

Every asset is validated before writing (bond lengths, overlaps, closure
type, complexity values printed for the record).
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from knotsteer.complexity import aun, tun
from knotsteer.curves import open_trefoil, slipknot_curve, _resample
from knotsteer.dynamics import (ChainParams, ChainState, DynamicsConfig,
                                equilibrium_bond_length, init_chain, relax_overdamped,
                                step_langevin)
from knotsteer.geometry import PolyCurve, write_curve
from knotsteer.knot_id import stochastic_closure

OUT = Path(__file__).resolve().parents[1] / "src" / "knotsteer" / "data" / "curves"


def build_deep_trefoil(n_total: int = 38, tail_beads: int = 5, seed: int = 12) -> PolyCurve:
    params = ChainParams()
    bond = equilibrium_bond_length(params)
    knot_beads = n_total - 2 * tail_beads
    base = open_trefoil(n=400, gap=0.55).vertices
    # scale the knot so its resampled arclength uses exactly knot_beads beads
    seg = np.linalg.norm(np.diff(base, axis=0), axis=1).sum()
    scale = bond * (knot_beads - 1) / seg
    knot = _resample(base * scale, bond)
    centroid = knot.mean(axis=0)
    leg_dir = knot[0] - centroid
    leg_dir /= np.linalg.norm(leg_dir)
    head_dir = knot[-1] - centroid
    head_dir /= np.linalg.norm(head_dir)
    steps = (np.arange(1, tail_beads + 1) * bond)[:, None]
    pts = np.vstack([(knot[0] + steps * leg_dir)[::-1], knot, knot[-1] + steps * head_dir])
    state = ChainState(positions=pts, velocities=np.zeros_like(pts), params=params)
    state = relax_overdamped(state, steps=4000, dt=2e-4)
    return state.curve()


def build_equilibrated(n: int = 52, seed: int = 2025, segments: int = 80) -> PolyCurve:
    state = init_chain(n, "straight", ChainParams(), seed=seed)
    rng = np.random.default_rng(seed)
    cfg = DynamicsConfig(dt=0.001, steps=500, seed=seed)
    for _ in range(segments):
        state = step_langevin(state, cfg, rng)
    return state.curve()


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    deep = build_deep_trefoil()
    bonds = deep.bond_lengths()
    assert bonds.max() < 1.2 and bonds.min() > 0.8, bonds
    dist = stochastic_closure(deep, n_closures=100, seed=1)
    a = aun(deep, n_dirs=200, seed=1)
    print(f"deep trefoil: n={len(deep)} bonds [{bonds.min():.3f}, {bonds.max():.3f}] "
          f"closure={dist.dominant} ({dist.fraction('3_1'):.2f}) AUN={a.value:.2f}")
    assert dist.dominant == "3_1" and dist.fraction("3_1") >= 0.9
    assert a.value > 0.5
    write_curve(OUT / "deep_trefoil_38.xyz", deep,
                header="38-bead chain, tight trefoil centred, relaxed at T=0")

    eq = build_equilibrated()
    dist = stochastic_closure(eq, n_closures=100, seed=2)
    a = aun(eq, n_dirs=200, seed=2)
    print(f"equilibrated 52: closure={dist.dominant} ({dist.fraction('0_1'):.2f}) "
          f"AUN={a.value:.3f}")
    assert dist.dominant == "0_1"
    write_curve(OUT / "equilibrated_52.xyz", eq,
                header="52-bead semiflexible chain thermalised at T=1")

    slip = slipknot_curve()
    a = aun(slip, n_dirs=200, seed=3)
    t = tun(slip, stride=6, n_dirs=32, seed=3)
    dist = stochastic_closure(slip, n_closures=100, seed=3)
    print(f"slipknot: n={len(slip)} AUN={a.value:.4f} TUN={t.value:.4f}+-{t.stderr:.4f} "
          f"closure={dist.dominant}")
    assert a.value < 0.1
    assert t.value > 5 * max(t.stderr, 1e-9)
    write_curve(OUT / "slipknot.xyz", slip,
                header="hairpin threaded through a trefoil; knotted subchain, trivial whole")

    print("assets written to", OUT)


if __name__ == "__main__":
    main()
