"""Acceptance gates.

Each test prints one PASS/FAIL line (run with ``-rA`` or ``-s`` to see them
on success).  Scale knobs sit at the top: defaults run the full desk-scale
protocol; ``KNOTSTEER_ACCEPT_SCALE=smoke`` shrinks the two long ensemble
criteria (6-9) for development iterations.
"""

import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pytest

from knotsteer.cli import main as cli_main
from knotsteer.complexity import aun, tun
from knotsteer.curves import (figure_eight_curve, granny_curve, open_trefoil,
                              random_open_walk)
from knotsteer.dynamics import (DEFAULT_K_BEND, ChainParams, ChainState, DynamicsConfig,
                                init_chain, kinetic_energy_per_dof,
                                measure_persistence_length, metropolis_crankshaft_sweep,
                                step_langevin)
from knotsteer.errors import DegenerateProjection
from knotsteer.geometry import PolyCurve, project, read_curve
from knotsteer.gsaw import EmpiricalAngles, SemiflexibleAngles, UniformAngles
from knotsteer.ingest import bundled_dataset
from knotsteer.knot_id import TWIST_KNOTS, knot_determinant, stochastic_closure
from knotsteer.knotoids import (GaussDiagram, PlanarMap, brute_force_unravel,
                                bundled_table, deep_simplify, fingerprint, insert_r1,
                                insert_r2, is_realizable, perform_r3)
from knotsteer.knotoids.diagram import extract_for_direction, find_crossings
from knotsteer.steering import (HybridPropagator, LangevinPropagator, SteeringConfig,
                                grow_steered_ensemble, steer, undirected_ensemble)

SMOKE = os.environ.get("KNOTSTEER_ACCEPT_SCALE", "full") == "smoke"

N_SEEDS = 3 if SMOKE else 10
UNKNOT_MAX_ITER = 100
UNDIRECTED_MAX_ITER = 60 if SMOKE else 400
KNOT_MAX_ITER = 60 if SMOKE else 260
BASELINE_SNAPSHOTS = 200 if SMOKE else 2000
GROW_WALKS = 20 if SMOKE else 100
GROW_LENGTH = 120 if SMOKE else 250
WORKERS = min(2, os.cpu_count() or 1)

ASSETS = Path(__file__).resolve().parents[1] / "src" / "knotsteer" / "data" / "curves"


def report(criterion: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {criterion}: {status} — {detail}")
    assert passed, f"{criterion}: {detail}"


def random_diagram(rng, max_crossings=8, min_crossings=0):
    while True:
        walk = random_open_walk(int(rng.integers(8, 30)), rng.integers(1 << 31))
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        try:
            diag = extract_for_direction(walk, d, rng)
        except DegenerateProjection:
            continue
        if min_crossings <= diag.n_crossings <= max_crossings:
            return diag


class TestCriterion1Invariance:
    def test_fingerprint_stability(self):
        rng = np.random.default_rng(101)
        t0 = time.time()
        n_diagrams = 200 if SMOKE else 1000
        stable = 0
        for _ in range(n_diagrams):
            diag = random_diagram(rng)
            base = fingerprint(diag)
            mutated = diag
            for _move in range(int(rng.integers(1, 4))):
                kind = int(rng.integers(3))
                if kind == 0:
                    n_arcs = 2 * mutated.n_crossings + 1
                    mutated = insert_r1(mutated, int(rng.integers(n_arcs)),
                                        over_first=bool(rng.integers(2)),
                                        sign=1 if rng.integers(2) else -1)
                elif kind == 1:
                    bigger = insert_r2(mutated, rng)
                    if bigger is not None:
                        mutated = bigger
                else:
                    moves = PlanarMap(mutated).triangle_moves()
                    if moves:
                        mutated = perform_r3(mutated, moves[int(rng.integers(len(moves)))])
            if fingerprint(mutated) == base:
                stable += 1
        elapsed = time.time() - t0
        report("1 invariance",
               stable == n_diagrams and elapsed < 300,
               f"{stable}/{n_diagrams} fingerprints stable under random "
               f"endpoint-respecting insertions in {elapsed:.0f}s")


def _pairings(n):
    def rec(slots):
        if not slots:
            yield []
            return
        first = slots[0]
        for j in range(1, len(slots)):
            for tail in rec(slots[1:j] + slots[j + 1:]):
                yield [(first, slots[j])] + tail
    yield from rec(list(range(2 * n)))


class TestCriterion2Oracles:
    def test_crossing_extraction_matches_bruteforce(self):
        from tests.test_diagram import brute_force_crossings

        rng = np.random.default_rng(202)
        n_curves = 100 if SMOKE else 500
        checked = 0
        while checked < n_curves:
            walk = random_open_walk(int(rng.integers(8, 40)), rng.integers(1 << 31))
            d = rng.standard_normal(3)
            d /= np.linalg.norm(d)
            geom = project(walk, d)
            try:
                fast = find_crossings(geom)
            except DegenerateProjection:
                continue
            slow = brute_force_crossings(geom)
            fast_pairs = sorted((min(c.over_segment, c.under_segment),
                                 max(c.over_segment, c.under_segment)) for c in fast)
            slow_pairs = sorted((i, j) for i, j, _, _ in slow)
            assert fast_pairs == slow_pairs, f"mismatch on curve {checked}"
            checked += 1
        report("2a extraction oracle", True,
               f"exact agreement on {n_curves} random projected curves")

    def test_bfs_matches_table_small_entries(self):
        # enumerate every realizable open code to 4 crossings, classify, and
        # re-derive each table entry's unravelling number with the search
        table = bundled_table()
        reps = {}
        for n in range(1, 5):
            for pairing in _pairings(n):
                for over_bits in range(1 << n):
                    for sign_bits in range(1 << n):
                        code = [None] * (2 * n)
                        for cid, (p1, p2) in enumerate(pairing):
                            over = bool((over_bits >> cid) & 1)
                            sign = 1 if (sign_bits >> cid) & 1 else -1
                            code[p1] = (cid, over, sign)
                            code[p2] = (cid, not over, sign)
                        diag = GaussDiagram(code)
                        if not is_realizable(diag):
                            continue
                        reduced = deep_simplify(diag)
                        if reduced.n_crossings == 0 or reduced.n_crossings > 4:
                            continue
                        key = fingerprint(reduced)
                        if key not in reps or reduced.n_crossings < reps[key].n_crossings:
                            reps[key] = reduced
        checked = 0
        for key, diag in sorted(reps.items()):
            entry = table.get(key)
            assert entry is not None, f"fingerprint {key} missing from table"
            if entry.crossings > 4:
                continue
            u = brute_force_unravel(diag, max_depth=8)
            assert u == entry.unravelling, \
                f"{entry.name}: BFS {u} != table {entry.unravelling}"
            checked += 1
        report("2b unravel oracle", checked >= 12,
               f"BFS unravelling equals table for {checked} entries <= 4 crossings")


class TestCriterion3KnotIdentification:
    def test_standard_knots(self):
        cases = [
            ("trefoil", open_trefoil(n=90, gap=0.5, tails=6), "3_1", 3),
            ("figure-eight", figure_eight_curve(n=140, gap=0.4, tails=6), "4_1", 5),
            ("granny", granny_curve(), "3_1#3_1", 9),
        ]
        details = []
        ok = True
        rng = np.random.default_rng(303)
        from collections import Counter

        from knotsteer.knot_id import close_curve

        for label, curve, want, want_det in cases:
            dist = stochastic_closure(curve, n_closures=100, seed=17)
            plurality = dist.fraction(want)
            dets = []
            for _ in range(7):
                d = rng.standard_normal(3)
                d /= np.linalg.norm(d)
                proj = rng.standard_normal(3)
                proj /= np.linalg.norm(proj)
                diag = deep_simplify(extract_for_direction(
                    PolyCurve(close_curve(curve, d)), proj, rng, closed=True))
                dets.append(knot_determinant(diag))
            det = Counter(dets).most_common(1)[0][0]
            details.append(f"{label}: {want} at {plurality:.2f}, det {det}")
            ok = ok and dist.dominant == want and plurality >= 0.9 and det == want_det
        report("3 knot identification", ok, "; ".join(details))


class TestCriterion4AunSanity:
    def test_straight_and_slipknot(self):
        pts = np.zeros((10, 3))
        pts[:, 0] = np.arange(10)
        straight = aun(PolyCurve(pts), n_dirs=100, seed=1)
        slip = read_curve(ASSETS / "slipknot.xyz")
        slip_aun = aun(slip, n_dirs=200, seed=1)
        slip_tun = tun(slip, stride=8, n_dirs=24, seed=1)
        ok = (straight.value == 0.0 and straight.stderr == 0.0
              and slip_aun.value < 0.1
              and slip_tun.value > 5.0 * max(slip_tun.stderr, 1e-12)
              and slip_tun.value > 5.0 * max(slip_aun.stderr, 1e-12))
        report("4 AUN sanity", ok,
               f"straight AUN {straight.value}; slipknot AUN {slip_aun.value:.4f}, "
               f"TUN {slip_tun.value:.4f} +- {slip_tun.stderr:.4f}")


class TestCriterion5Thermostat:
    def test_thermostat_fene_persistence(self):
        t0 = time.time()
        state = init_chain(38, "straight")
        cfg = DynamicsConfig(dt=0.001, steps=500)
        rng = np.random.default_rng(404)
        n_segments = 40 if SMOKE else 200   # 200 x 500 = 1e5 steps
        ke = []
        max_bond = 0.0
        for seg in range(n_segments):
            state = step_langevin(state, cfg, rng)
            bonds = np.linalg.norm(np.diff(state.positions, axis=0), axis=1)
            max_bond = max(max_bond, float(bonds.max()))
            if seg >= n_segments // 5:
                ke.append(kinetic_energy_per_dof(state))
        ke_mean = float(np.mean(ke))
        lp = measure_persistence_length(ChainParams(), seed=1,
                                        n_samples=300 if SMOKE else 1300)
        elapsed = time.time() - t0
        ok = (abs(ke_mean - 0.5) < 0.025 and max_bond < 1.5
              and 9.0 <= lp <= 11.0 and elapsed < 600)
        report("5 thermostat/model", ok,
               f"KE/dof {ke_mean:.4f} (target 0.5 +-5%), max bond {max_bond:.3f} "
               f"< 1.5, lp {lp:.2f} in [9, 11], {elapsed:.0f}s")


def _unknot_iteration(aun_series, threshold=0.05, patience=3):
    run = 0
    for i, v in enumerate(aun_series):
        run = run + 1 if v < threshold else 0
        if run >= patience:
            return i - patience + 2  # first iteration of the sustained window
    return math.inf


def _steer_unknot(args):
    seed, functional = args
    asset = read_curve(ASSETS / "deep_trefoil_38.xyz")
    x = np.array(asset.vertices)
    state = ChainState(positions=x, velocities=np.zeros_like(x),
                       params=ChainParams(), seed=seed)
    # TUN evaluates ~54 subchains per score: a 16-direction inner budget
    # keeps ten 40-candidate runs inside the criterion's wall-clock cap
    cfg = SteeringConfig(k_candidates=40, horizon=500, direction="minimize",
                         functional=functional, n_dirs=64 if functional == "aun" else 16,
                         stride=4, max_iterations=UNKNOT_MAX_ITER,
                         stop_threshold=0.02, stop_patience=3, master_seed=seed)
    traj = steer(state, LangevinPropagator(dt=0.001), cfg)
    return seed, _unknot_iteration(traj.aun_values()), len(traj.records)


def _undirected_unknot(seed):
    asset = read_curve(ASSETS / "deep_trefoil_38.xyz")
    x = np.array(asset.vertices)
    state = ChainState(positions=x, velocities=np.zeros_like(x),
                       params=ChainParams(), seed=seed)
    runs = undirected_ensemble(state, LangevinPropagator(dt=0.001), n_runs=1,
                               horizon=500, max_iterations=UNDIRECTED_MAX_ITER,
                               seed=seed, n_dirs=64)
    return _unknot_iteration(runs[0].aun_values())


class TestCriterion6DirectedUnknotting:
    def test_unknotting_faster_than_undirected(self):
        t0 = time.time()
        seeds = list(range(1, N_SEEDS + 1))
        with ProcessPoolExecutor(max_workers=WORKERS) as pool:
            aun_runs = list(pool.map(_steer_unknot, [(s, "aun") for s in seeds]))
            undirected = list(pool.map(_undirected_unknot, [100 + s for s in seeds]))
            tun_runs = list(pool.map(_steer_unknot, [(s, "tun") for s in seeds]))
        aun_iters = [it for _, it, _ in aun_runs]
        tun_iters = [it for _, it, _ in tun_runs]
        solved = sum(1 for it in aun_iters if it <= UNKNOT_MAX_ITER)
        aun_median = float(np.median(aun_iters))
        und_median = float(np.median(undirected))
        tun_not_slower = sum(1 for it in tun_iters if it <= aun_median)
        elapsed = time.time() - t0
        need_solved = math.ceil(0.8 * N_SEEDS)
        need_tun = math.ceil(0.6 * N_SEEDS)
        ok = (solved >= need_solved and aun_median < und_median
              and tun_not_slower >= need_tun and elapsed < 7200)
        report("6 directed unknotting", ok,
               f"AUN-steered solved {solved}/{N_SEEDS} (iters {aun_iters}), "
               f"median {aun_median} vs undirected median {und_median} "
               f"(undirected iters {undirected}), TUN within AUN median for "
               f"{tun_not_slower}/{N_SEEDS} (iters {tun_iters}), {elapsed:.0f}s")


def _baseline_stream(args):
    stream_seed, n_snapshots = args
    rng = np.random.default_rng(np.random.SeedSequence([505, stream_seed]))
    state = init_chain(52, "coil", seed=stream_seed)
    cfg = DynamicsConfig(dt=0.001, steps=300)
    for _ in range(15):
        state = step_langevin(state, cfg, rng)
        state, _ = metropolis_crankshaft_sweep(state, rng)
    nontrivial = 0
    knotted = 0
    for k in range(n_snapshots):
        for _ in range(3):
            state, _ = metropolis_crankshaft_sweep(state, rng)
        state = step_langevin(state, cfg, rng)
        est = aun(state.curve(), n_dirs=500, seed=(stream_seed, k))
        if est.value > 0:
            nontrivial += 1
            dist = stochastic_closure(state.curve(), n_closures=30,
                                      seed=stream_seed * 1000 + k)
            if dist.dominant != "0_1":
                knotted += 1
    return nontrivial, knotted


class TestCriterion7UndirectedBaseline:
    def test_equilibrium_entanglement_rates(self):
        t0 = time.time()
        n_streams = 8
        per_stream = BASELINE_SNAPSHOTS // n_streams
        with ProcessPoolExecutor(max_workers=WORKERS) as pool:
            results = list(pool.map(_baseline_stream,
                                    [(s, per_stream) for s in range(n_streams)]))
        total = n_streams * per_stream
        nontrivial = sum(r[0] for r in results)
        knotted = sum(r[1] for r in results)
        frac = nontrivial / total
        knot_frac = knotted / total
        elapsed = time.time() - t0
        ok = 0.002 <= frac <= 0.03 and knot_frac <= 0.003
        report("7 undirected baseline", ok,
               f"nontrivial-AUN {nontrivial}/{total} = {frac:.4f} "
               f"(band [0.002, 0.03]), knotted {knotted}/{total} = {knot_frac:.4f} "
               f"(<= 0.003), {elapsed:.0f}s")


def _steer_knot(seed):
    asset = read_curve(ASSETS / "equilibrated_52.xyz")
    x = np.array(asset.vertices)
    state = ChainState(positions=x, velocities=np.zeros_like(x),
                       params=ChainParams(), seed=seed)
    cfg = SteeringConfig(k_candidates=40, horizon=500, direction="maximize",
                         functional="aun", n_dirs=64,
                         max_iterations=KNOT_MAX_ITER, master_seed=seed)
    traj = steer(state, HybridPropagator(dt=0.001), cfg, record_knots=True,
                 knot_closures=30)
    return seed, [r.knot_type for r in traj.records]


class TestCriterion8DirectedKnotting:
    def test_torus_knot_sequence(self):
        t0 = time.time()
        seeds = list(range(11, 11 + N_SEEDS))
        with ProcessPoolExecutor(max_workers=WORKERS) as pool:
            outcomes = list(pool.map(_steer_knot, seeds))
        reached_31 = 0
        reached_51_after = 0
        per_seed = []
        for seed, types in outcomes:
            first31 = next((i for i, t in enumerate(types) if t == "3_1"), None)
            later51 = (first31 is not None
                       and any(t == "5_1" for t in types[first31 + 1:]))
            reached_31 += first31 is not None
            reached_51_after += bool(later51)
            last = next((t for t in reversed(types) if t), "0_1")
            per_seed.append(f"s{seed}:{'3_1@' + str(first31) if first31 is not None else '-'}"
                            f"{'→5_1' if later51 else ''} end {last}")
        elapsed = time.time() - t0
        need31 = math.ceil(0.5 * N_SEEDS)
        need51 = max(1, math.ceil(0.2 * N_SEEDS))
        ok = reached_31 >= need31 and reached_51_after >= need51
        report("8 directed knotting", ok,
               f"{reached_31}/{N_SEEDS} reached dominant 3_1, "
               f"{reached_51_after}/{N_SEEDS} later reached 5_1 "
               f"[{'; '.join(per_seed)}] {elapsed:.0f}s")


def _two_proportion_p(k1, n1, k2, n2):
    """One-sided z-test that rate 1 exceeds rate 2."""
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    if se == 0:
        return 0.5
    z = (p1 - p2) / se
    return 0.5 * math.erfc(z / math.sqrt(2))


class TestCriterion9SteeredGrowth:
    def test_growth_spectra(self):
        t0 = time.time()
        dataset = bundled_dataset()
        models = {
            "unbiased": SemiflexibleAngles(),
            "protein": EmpiricalAngles.from_dataset(dataset, "full"),
            "protein_no_helix": EmpiricalAngles.from_dataset(dataset, "no_helices"),
            "protein_only_helix": EmpiricalAngles.from_dataset(dataset, "only_helices"),
        }
        cfg = SteeringConfig(k_candidates=20, horizon=10, direction="maximize",
                             functional="aun", n_dirs=64, max_iterations=10 ** 9,
                             master_seed=909)
        tables = {}
        for name, model in models.items():
            tables[name] = grow_steered_ensemble(model, n_walks=GROW_WALKS,
                                                 target_length=GROW_LENGTH, cfg=cfg,
                                                 closures=24, workers=WORKERS)
        L = GROW_LENGTH
        knotted = {name: round(t.knotted_fraction(L), 3) for name, t in tables.items()}
        twist = {name: round(t.twist_fraction(L), 3) for name, t in tables.items()}
        reached = {name: t.reached.get(L, 0) for name, t in tables.items()}
        elapsed = time.time() - t0
        if SMOKE:
            ok = (knotted["protein_only_helix"] >= knotted["unbiased"] * 0.5
                  and elapsed < 1200)
            report("9 steered growth (smoke: orderings only)", ok,
                   f"knotted {knotted}, twist {twist}, {elapsed:.0f}s")
            return
        protein_min = min(knotted["protein"], knotted["protein_no_helix"],
                          knotted["protein_only_helix"])
        k_oh = round(twist["protein_only_helix"] * reached["protein_only_helix"])
        k_ub = round(twist["unbiased"] * reached["unbiased"])
        p_value = _two_proportion_p(k_oh, reached["protein_only_helix"],
                                    k_ub, reached["unbiased"])
        ok = (all(v >= 0.30 for v in knotted.values())
              and protein_min >= knotted["unbiased"]
              and twist["protein_only_helix"] > twist["unbiased"]
              and p_value < 0.05
              and abs(twist["protein_only_helix"] - 0.08) <= 0.04
              and abs(twist["unbiased"] - 0.02) <= 0.04
              and elapsed < 8 * 3600)
        report("9 steered growth", ok,
               f"knotted {knotted}, twist {twist}, one-sided p {p_value:.4f}, "
               f"{elapsed:.0f}s")


class TestCriterion10Determinism:
    def test_byte_identical_reruns(self, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"unknot_{tag}"
            rc = cli_main(["unknot", "--k", "3", "--horizon", "60", "--iters", "3",
                           "--dirs", "16", "--seed", "7", "--no-plot",
                           "--out", str(out)])
            assert rc == 0
            outs.append(out)
        traj_same = ((outs[0] / "trajectory.csv").read_bytes()
                     == (outs[1] / "trajectory.csv").read_bytes())
        grow_outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"grow_{tag}"
            rc = cli_main(["grow", "--model", "unbiased", "--walks", "2",
                           "--length", "30", "--k", "2", "--dirs", "16",
                           "--closures", "6", "--seed", "5", "--no-plot",
                           "--out", str(out)])
            assert rc == 0
            grow_outs.append(out)
        kym_same = ((grow_outs[0] / "kymograph.csv").read_bytes()
                    == (grow_outs[1] / "kymograph.csv").read_bytes())
        twist_same = ((grow_outs[0] / "twist_proportions.csv").read_bytes()
                      == (grow_outs[1] / "twist_proportions.csv").read_bytes())
        ok = traj_same and kym_same and twist_same
        report("10 determinism", ok,
               f"trajectory {traj_same}, kymograph {kym_same}, twist {twist_same}")
