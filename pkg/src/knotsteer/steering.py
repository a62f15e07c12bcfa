"""Greedy topological steering of stochastic propagators.

One iteration spawns K candidate continuations of the current configuration
(independent RNG streams derived from (master seed, iteration, candidate)),
scores each candidate's curve with a complexity functional evaluated on a
common direction set, and adopts the extremal candidate (ties to the lowest
index).  With K = 1 this reduces exactly to an undirected run.

Candidates within an iteration may be evaluated by worker processes; the
adopt step is a serial barrier and results are identical to serial
execution because every candidate's work is a pure function of its seeds.
"""

from __future__ import annotations

import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .complexity import ComplexityEstimate, aun, directions_for_seed, tun
from .dynamics import ChainState, DynamicsConfig, crankshaft_move, step_langevin
from .errors import IntegrationBlowup, InvalidArgument, SteeringAbort
from .gsaw import GrowthState, grow
from .knot_id import stochastic_closure

__all__ = [
    "SteeringConfig", "IterationRecord", "SteeringTrajectory",
    "LangevinPropagator", "CrankshaftPropagator", "HybridPropagator", "GrowthPropagator",
    "steer", "undirected_ensemble", "grow_steered_ensemble", "KymographTable",
]


@dataclass(frozen=True)
class SteeringConfig:
    k_candidates: int = 40
    horizon: int = 500
    direction: str = "minimize"
    functional: str = "aun"
    n_dirs: int = 64
    stride: int = 4
    max_iterations: int = 100
    stop_threshold: float | None = None
    stop_patience: int = 3
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.k_candidates < 1 or self.horizon < 1:
            raise InvalidArgument("need k_candidates >= 1 and horizon >= 1")
        if self.direction not in ("minimize", "maximize"):
            raise InvalidArgument(f"unknown direction {self.direction!r}")
        if self.functional not in ("aun", "tun"):
            raise InvalidArgument(f"unknown functional {self.functional!r}")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    chosen_index: int
    chosen_value: float
    chosen_stderr: float
    candidate_values: tuple[float, ...]
    aun_value: float
    direction_hash: int
    wall_time: float
    knot_type: str = ""


@dataclass
class SteeringTrajectory:
    records: list[IterationRecord] = field(default_factory=list)
    stop_reason: str = "max_iterations"
    final_config: object = None

    def chosen_values(self) -> list[float]:
        return [r.chosen_value for r in self.records]

    def aun_values(self) -> list[float]:
        return [r.aun_value for r in self.records]


def _candidate_rng(master_seed: int, iteration: int, candidate: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(master_seed) & 0x7FFFFFFF, iteration, candidate]))


def _direction_seed(master_seed: int, iteration: int) -> int:
    return zlib.crc32(f"{master_seed}:{iteration}".encode()) & 0x7FFFFFFF


def _direction_hash(n_dirs: int, seed: int) -> int:
    dirs = directions_for_seed(n_dirs, seed)
    return zlib.crc32(np.ascontiguousarray(dirs).tobytes())


class LangevinPropagator:
    """Advances a ChainState by ``horizon`` Langevin steps per iteration."""

    def __init__(self, dt: float = 0.001):
        self.dt = dt

    def advance(self, state: ChainState, rng, horizon: int) -> ChainState:
        cfg = DynamicsConfig(dt=self.dt, steps=horizon)
        return step_langevin(state, cfg, rng)

    @staticmethod
    def curve(state: ChainState):
        return state.curve()


class CrankshaftPropagator:
    """Advances a ChainState by ``horizon`` crankshaft attempts."""

    def advance(self, state: ChainState, rng, horizon: int) -> ChainState:
        current = state
        for _ in range(horizon):
            current, _accepted = crankshaft_move(current, rng)
        return current

    @staticmethod
    def curve(state: ChainState):
        return state.curve()


class HybridPropagator:
    """Metropolis crankshaft sweep followed by a Langevin segment.

    The sweep decorrelates the conformation far faster than the integrator
    alone (one Langevin horizon moves a stiff chain by a fraction of its
    relaxation time), and the Langevin segment rethermalises the result.
    Used by the entangling (knot) pipeline where candidate diversity is the
    bottleneck.
    """

    def __init__(self, dt: float = 0.001, sweep_moves: int | None = None):
        self.dt = dt
        self.sweep_moves = sweep_moves

    def advance(self, state: ChainState, rng, horizon: int) -> ChainState:
        from .dynamics import metropolis_crankshaft_sweep

        moved, _ = metropolis_crankshaft_sweep(state, rng, n_moves=self.sweep_moves,
                                               local_energy=True)
        cfg = DynamicsConfig(dt=self.dt, steps=horizon)
        return step_langevin(moved, cfg, rng)

    @staticmethod
    def curve(state: ChainState):
        return state.curve()


class GrowthPropagator:
    """Clones a GrowthState and grows ``horizon`` beads per iteration."""

    def __init__(self, model, max_attempts: int | None = None):
        self.model = model
        self.max_attempts = max_attempts

    def advance(self, state: GrowthState, rng, horizon: int) -> GrowthState:
        clone = state.copy()
        grow(clone, self.model, horizon, rng, max_attempts=self.max_attempts)
        if clone.status == "trapped":
            raise _TrappedWalk(clone)
        return clone

    @staticmethod
    def curve(state: GrowthState):
        return state.curve()


class _TrappedWalk(Exception):
    def __init__(self, state):
        super().__init__("walk trapped")
        self.state = state


def _score(curve, cfg: SteeringConfig, dir_seed: int) -> ComplexityEstimate:
    if cfg.functional == "aun":
        return aun(curve, n_dirs=cfg.n_dirs, seed=dir_seed)
    return tun(curve, stride=cfg.stride, n_dirs=cfg.n_dirs, seed=dir_seed)


def _evaluate_candidate(args):
    propagator, config, cfg, iteration, k, dir_seed = args
    rng = _candidate_rng(cfg.master_seed, iteration, k)
    try:
        candidate = propagator.advance(config, rng, cfg.horizon)
    except (_TrappedWalk, IntegrationBlowup) as exc:
        return k, None, None, type(exc).__name__
    est = _score(propagator.curve(candidate), cfg, dir_seed)
    return k, candidate, est, ""


def _run_candidates(propagator, config, cfg: SteeringConfig, iteration: int,
                    dir_seed: int, pool):
    jobs = [(propagator, config, cfg, iteration, k, dir_seed)
            for k in range(cfg.k_candidates)]
    if pool is None:
        results = [_evaluate_candidate(j) for j in jobs]
    else:
        results = list(pool.map(_evaluate_candidate, jobs, chunksize=1))
    results.sort(key=lambda r: r[0])
    return results


def steer(initial, propagator, cfg: SteeringConfig,
          record_knots: bool = False, knot_closures: int = 30,
          on_adopt=None) -> SteeringTrajectory:
    """Run the steering loop; deterministic given ``cfg.master_seed``."""
    traj = SteeringTrajectory()
    config = initial
    streak = 0
    pool = None
    try:
        if cfg.workers > 1 and cfg.k_candidates > 1:
            pool = ProcessPoolExecutor(max_workers=min(cfg.workers, cfg.k_candidates))
        for iteration in range(cfg.max_iterations):
            t0 = time.perf_counter()
            dir_seed = _direction_seed(cfg.master_seed, iteration)
            results = _run_candidates(propagator, config, cfg, iteration, dir_seed, pool)
            alive = [(k, cand, est) for k, cand, est, err in results if cand is not None]
            if not alive:
                traj.stop_reason = "all_candidates_failed"
                if isinstance(initial, GrowthState):
                    break
                raise SteeringAbort(f"iteration {iteration}: every candidate failed")
            values = [est.value for _, _, est in alive]
            if cfg.direction == "minimize":
                best_pos = int(np.argmin(values))
            else:
                best_pos = int(np.argmax(values))
            k_best, config, est_best = alive[best_pos]
            if cfg.functional == "aun":
                aun_value = est_best.value
            else:
                aun_value = aun(propagator.curve(config), n_dirs=cfg.n_dirs,
                                seed=dir_seed).value
            knot_name = ""
            if record_knots:
                knot_name = stochastic_closure(propagator.curve(config),
                                               n_closures=knot_closures,
                                               seed=dir_seed).dominant
            if on_adopt is not None:
                on_adopt(iteration, config)
            traj.records.append(IterationRecord(
                iteration=iteration,
                chosen_index=k_best,
                chosen_value=est_best.value,
                chosen_stderr=est_best.stderr,
                candidate_values=tuple(values),
                aun_value=aun_value,
                direction_hash=_direction_hash(cfg.n_dirs, dir_seed),
                wall_time=time.perf_counter() - t0,
                knot_type=knot_name,
            ))
            if cfg.stop_threshold is not None and cfg.direction == "minimize":
                streak = streak + 1 if aun_value < cfg.stop_threshold else 0
                if streak >= cfg.stop_patience:
                    traj.stop_reason = "threshold"
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    traj.final_config = config
    return traj


def undirected_ensemble(initial, propagator, n_runs: int, horizon: int,
                        max_iterations: int, seed: int = 0, n_dirs: int = 64,
                        functional: str = "aun", stride: int = 4,
                        workers: int = 1) -> list[SteeringTrajectory]:
    """Control runs without selection pressure (K = 1 steering per run)."""
    if n_runs < 1:
        raise InvalidArgument("need n_runs >= 1")
    out = []
    for run in range(n_runs):
        cfg = SteeringConfig(k_candidates=1, horizon=horizon, direction="minimize",
                             functional=functional, n_dirs=n_dirs, stride=stride,
                             max_iterations=max_iterations,
                             master_seed=_run_seed(seed, run), workers=1)
        out.append(steer(initial, propagator, cfg))
    return out


def _run_seed(seed: int, run: int) -> int:
    return zlib.crc32(f"run:{seed}:{run}".encode()) & 0x7FFFFFFF


@dataclass
class KymographTable:
    """Rows of (length, knot type, fraction, model) for a walk ensemble."""

    model: str
    lengths: list[int]
    fractions: dict[tuple[int, str], float]
    reached: dict[int, int]
    trapped_walks: int
    n_walks: int

    def fraction(self, length: int, name: str) -> float:
        return self.fractions.get((length, name), 0.0)

    def knotted_fraction(self, length: int) -> float:
        return sum(v for (ln, name), v in self.fractions.items()
                   if ln == length and name != "0_1")

    def twist_fraction(self, length: int, include_trefoil: bool = False) -> float:
        from .knot_id import TWIST_KNOTS

        names = TWIST_KNOTS | ({"3_1"} if include_trefoil else set())
        return sum(v for (ln, name), v in self.fractions.items()
                   if ln == length and name in names)

    def rows(self):
        for (length, name), frac in sorted(self.fractions.items()):
            yield {"length": length, "knot_type": name, "fraction": frac,
                   "model": self.model}


def _grow_one_walk(args):
    (model, cfg, walk_index, target_length, policy, max_attempts,
     closures) = args
    state = GrowthState(policy=policy, max_attempts=max_attempts)
    propagator = GrowthPropagator(model, max_attempts=max_attempts)
    walk_seed = _run_seed(cfg.master_seed, walk_index)
    local = replace(cfg, master_seed=walk_seed, workers=1,
                    max_iterations=10 ** 9)
    types_at: list[tuple[int, str]] = []
    config = state
    iteration = 0
    while config.n_beads < target_length:
        # align record lengths on multiples of the horizon
        next_mark = (config.n_beads // cfg.horizon + 1) * cfg.horizon
        n_add = min(next_mark, target_length) - config.n_beads
        step_cfg = replace(local, horizon=n_add)
        dir_seed = _direction_seed(local.master_seed, iteration)
        results = _run_candidates(propagator, config, step_cfg, iteration, dir_seed, None)
        alive = [(k, cand, est) for k, cand, est, err in results if cand is not None]
        if not alive:
            return walk_index, types_at, True, config.n_beads
        values = [est.value for _, _, est in alive]
        pick = int(np.argmax(values)) if local.direction == "maximize" else int(np.argmin(values))
        _, config, _ = alive[pick]
        name = stochastic_closure(config.curve(), n_closures=closures,
                                  seed=dir_seed).dominant
        types_at.append((config.n_beads, name))
        iteration += 1
    return walk_index, types_at, False, config.n_beads


def grow_steered_ensemble(model, n_walks: int, target_length: int,
                          cfg: SteeringConfig, policy: str = "strict",
                          max_attempts: int | None = None, closures: int = 24,
                          workers: int | None = None) -> KymographTable:
    """Steered growth ensemble and its knot-spectrum kymograph.

    Each walk is independent and steered with ``cfg`` (direction defaults to
    maximize for growth); the knot type of the adopted configuration is
    recorded every ``cfg.horizon`` beads.  Trapped walks are kept up to the
    length they reached and excluded from fractions beyond it.
    """
    if n_walks < 1:
        raise InvalidArgument("need n_walks >= 1")
    from .gsaw import DEFAULT_MAX_ATTEMPTS

    attempts = max_attempts if max_attempts is not None else DEFAULT_MAX_ATTEMPTS
    jobs = [(model, cfg, w, target_length, policy, attempts, closures)
            for w in range(n_walks)]
    n_workers = workers if workers is not None else cfg.workers
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_grow_one_walk, jobs, chunksize=1))
    else:
        outcomes = [_grow_one_walk(j) for j in jobs]
    outcomes.sort(key=lambda o: o[0])

    counts: dict[tuple[int, str], int] = {}
    reached: dict[int, int] = {}
    trapped_walks = 0
    lengths: set[int] = set()
    for _w, types_at, trapped, _final_len in outcomes:
        trapped_walks += int(trapped)
        for length, name in types_at:
            lengths.add(length)
            reached[length] = reached.get(length, 0) + 1
            counts[(length, name)] = counts.get((length, name), 0) + 1
    fractions = {key: counts[key] / reached[key[0]] for key in counts}
    return KymographTable(model=getattr(model, "name", "model"),
                          lengths=sorted(lengths), fractions=fractions,
                          reached=reached, trapped_walks=trapped_walks,
                          n_walks=n_walks)
