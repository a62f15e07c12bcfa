"""Bead-spring chain dynamics: FENE bonds, WCA repulsion, bending stiffness.

Units are the usual reduced set: bead diameter sigma = 1 (the length unit
everywhere in this package), epsilon = 1, mass = 1, so the time unit is the
Lennard-Jones time.  Bonded beads interact through FENE springs (maximum
extension R0 = 1.5 sigma) plus the same purely repulsive WCA potential as
every other pair; bending is a Kratky-Porod term on the cosine of the angle
between successive beads.  The integrator is BAOAB velocity-Verlet Langevin:
deterministic given the noise generator, and accurate enough that kinetic
temperature matches the thermostat to well under a percent at dt = 0.001.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationFailure, IntegrationBlowup, InvalidArgument, InvalidConfiguration
from .geometry import PolyCurve, read_curve

# bending constant giving a persistence length of 10 sigma, pinned by
# scripts/calibrate_dynamics.py (equilibrium tangent-correlation fit)
DEFAULT_K_BEND = 9.8

_WCA_CUTOFF = 2.0 ** (1.0 / 6.0)
_BLOWUP_MARGIN = 1e-6


@dataclass(frozen=True)
class ChainParams:
    k_fene: float = 30.0
    r0: float = 1.5
    epsilon: float = 1.0
    k_bend: float = DEFAULT_K_BEND
    temperature: float = 1.0
    gamma: float = 1.0
    mass: float = 1.0


@dataclass(frozen=True)
class DynamicsConfig:
    dt: float = 0.001
    steps: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0 or self.steps < 1:
            raise InvalidArgument("need dt > 0 and steps >= 1")


@dataclass(frozen=True)
class ChainState:
    positions: np.ndarray
    velocities: np.ndarray
    params: ChainParams
    seed: int = 0

    def __post_init__(self):
        for arr in (self.positions, self.velocities):
            arr.setflags(write=False)
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise InvalidConfiguration("non-finite state")
        bonds = np.linalg.norm(np.diff(self.positions, axis=0), axis=1)
        if np.any(bonds >= self.params.r0):
            raise InvalidConfiguration("bond at or beyond maximum extension")

    @property
    def n_beads(self) -> int:
        return self.positions.shape[0]

    def curve(self) -> PolyCurve:
        return PolyCurve(self.positions, bead_radius=0.5)

    def with_positions(self, positions, velocities=None) -> "ChainState":
        v = self.velocities if velocities is None else np.asarray(velocities, float)
        return replace(self, positions=np.asarray(positions, float).copy(),
                       velocities=v.copy())


def compute_forces(x: np.ndarray, p: ChainParams):
    """Total force array plus (potential energy, max bond length)."""
    n = x.shape[0]
    f = np.zeros_like(x)

    # WCA between all pairs
    diff = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, np.inf)
    close = r2 < _WCA_CUTOFF * _WCA_CUTOFF
    energy = 0.0
    if np.any(close):
        inv2 = np.where(close, 1.0 / r2, 0.0)
        s6 = inv2 * inv2 * inv2
        s12 = s6 * s6
        fmag = 24.0 * p.epsilon * (2.0 * s12 - s6) * inv2
        f += np.einsum("ij,ijk->ik", fmag, diff)
        energy += 0.5 * float(np.sum(np.where(close, 4.0 * p.epsilon * (s12 - s6) + p.epsilon, 0.0)))

    # FENE bonds
    bonds = x[1:] - x[:-1]
    b2 = np.einsum("ij,ij->i", bonds, bonds)
    max_bond = math.sqrt(float(b2.max())) if n > 1 else 0.0
    r0sq = p.r0 * p.r0
    if max_bond >= p.r0 * (1.0 - _BLOWUP_MARGIN):
        raise IntegrationBlowup(f"bond length {max_bond:.6f} approaching R0 = {p.r0}")
    denom = 1.0 - b2 / r0sq
    coeff = (p.k_fene / denom)[:, None]
    f[:-1] += coeff * bonds
    f[1:] -= coeff * bonds
    energy += float(-0.5 * p.k_fene * r0sq * np.sum(np.log(denom)))

    # Kratky-Porod bending on interior vertices
    if n >= 3 and p.k_bend != 0.0:
        u1 = x[:-2] - x[1:-1]
        u2 = x[2:] - x[1:-1]
        n1 = np.linalg.norm(u1, axis=1, keepdims=True)
        n2 = np.linalg.norm(u2, axis=1, keepdims=True)
        e1 = u1 / n1
        e2 = u2 / n2
        cos_t = np.einsum("ij,ij->i", e1, e2)[:, None]
        g_prev = (e2 - cos_t * e1) / n1     # d cos / d x_{i-1}
        g_next = (e1 - cos_t * e2) / n2     # d cos / d x_{i+1}
        f[:-2] += -p.k_bend * g_prev
        f[2:] += -p.k_bend * g_next
        f[1:-1] += p.k_bend * (g_prev + g_next)
        energy += float(p.k_bend * np.sum(1.0 + cos_t))

    return f, energy, max_bond


def equilibrium_bond_length(p: ChainParams | None = None) -> float:
    """Bond length minimising the FENE + WCA pair energy (bisection on the
    derivative)."""
    p = p or ChainParams()

    def dV(r: float) -> float:
        fene = p.k_fene * r / (1.0 - (r / p.r0) ** 2)
        if r < _WCA_CUTOFF:
            wca = -24.0 * p.epsilon * (2.0 * r ** -13 - r ** -7)
        else:
            wca = 0.0
        return fene + wca

    lo, hi = 0.8, min(_WCA_CUTOFF, p.r0 * 0.999)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dV(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def init_chain(n: int, shape: str = "straight", params: ChainParams | None = None,
               seed: int = 0, path=None) -> ChainState:
    """Fresh chain: 'straight', 'coil' (stiffness-matched growth) or 'from_file'."""
    if n < 3 and shape != "from_file":
        raise InvalidArgument("need at least 3 beads")
    params = params or ChainParams()
    bond = equilibrium_bond_length(params)
    if shape == "straight":
        x = np.zeros((n, 3))
        x[:, 0] = bond * np.arange(n)
    elif shape == "coil":
        rng = np.random.default_rng(seed)
        x = _grow_coil(n, bond, params, rng)
    elif shape == "from_file":
        if path is None:
            raise InvalidArgument("from_file needs a path")
        curve = read_curve(path)
        x = np.array(curve.vertices)
        _validate_positions(x, params)
        n = x.shape[0]
    else:
        raise InvalidArgument(f"unknown chain shape {shape!r}")
    return ChainState(positions=x, velocities=np.zeros((n, 3)),
                      params=params, seed=seed)


def _validate_positions(x: np.ndarray, p: ChainParams) -> None:
    bonds = np.linalg.norm(np.diff(x, axis=0), axis=1)
    if np.any(bonds >= p.r0):
        raise InvalidConfiguration("bond at or beyond maximum extension")
    n = x.shape[0]
    d2 = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    idx = np.arange(n - 1)
    d2[idx, idx + 1] = np.inf
    d2[idx + 1, idx] = np.inf
    if float(d2.min()) < 1.0:
        raise InvalidConfiguration("non-bonded beads overlap (separation < 1 sigma)")


def _grow_coil(n: int, bond: float, p: ChainParams, rng) -> np.ndarray:
    """Grow a self-avoiding coil with the chain's bending statistics."""
    if p.k_bend <= 0:
        sigma_theta = 1.0
    else:
        sigma_theta = math.sqrt(bond * p.temperature / p.k_bend)
    for _attempt in range(40):
        x = np.zeros((n, 3))
        x[1, 0] = bond
        ok = True
        for i in range(2, n):
            placed = False
            for _ in range(80):
                prev = x[i - 1] - x[i - 2]
                prev /= np.linalg.norm(prev)
                dev = abs(rng.normal(0.0, sigma_theta))
                phi = rng.uniform(0.0, 2.0 * math.pi)
                perp = _any_perp(prev)
                perp2 = np.cross(prev, perp)
                step = (math.cos(dev) * prev
                        + math.sin(dev) * (math.cos(phi) * perp + math.sin(phi) * perp2))
                cand = x[i - 1] + bond * step
                d2 = np.sum((x[:i - 1] - cand) ** 2, axis=1)
                if np.all(d2 >= 1.0):
                    x[i] = cand
                    placed = True
                    break
            if not placed:
                ok = False
                break
        if ok:
            return x
    raise InvalidConfiguration("coil growth failed to avoid overlaps")


def _any_perp(v: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    p = np.cross(v, axis)
    return p / np.linalg.norm(p)


def step_langevin(state: ChainState, cfg: DynamicsConfig,
                  rng: np.random.Generator | None = None) -> ChainState:
    """Advance one segment of ``cfg.steps`` BAOAB steps.

    Deterministic given the generator (or ``cfg.seed`` when none is passed).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    p = state.params
    dt = cfg.dt
    x = np.array(state.positions)
    v = np.array(state.velocities)
    m = p.mass
    c1 = math.exp(-p.gamma * dt)
    c2 = math.sqrt((1.0 - c1 * c1) * p.temperature / m)
    f, _, _ = compute_forces(x, p)
    half = 0.5 * dt
    for _ in range(cfg.steps):
        v += half * f / m
        x += half * v
        if c2 > 0.0:
            v = c1 * v + c2 * rng.standard_normal(x.shape)
        else:
            v = c1 * v
        x += half * v
        f, _, _ = compute_forces(x, p)
        v += half * f / m
    return ChainState(positions=x, velocities=v, params=p, seed=state.seed)


def kinetic_energy_per_dof(state: ChainState) -> float:
    v = state.velocities
    return float(0.5 * state.params.mass * np.sum(v * v) / v.size)


def relax_overdamped(state: ChainState, steps: int, dt: float = 5e-4) -> ChainState:
    """Zero-temperature gradient relaxation; energy is non-increasing."""
    x = np.array(state.positions)
    p = state.params
    for _ in range(steps):
        f, _, _ = compute_forces(x, p)
        x += dt * f / p.gamma
    return ChainState(positions=x, velocities=np.zeros_like(x), params=p,
                      seed=state.seed)


def crankshaft_move(state: ChainState, rng: np.random.Generator,
                    min_separation: float = 1.0) -> tuple[ChainState, bool]:
    """Rotate a random interior sub-segment about its end-to-end axis.

    Bond lengths are preserved exactly; the move is rejected (state returned
    unchanged) when any non-bonded pair would come closer than
    ``min_separation``.
    """
    n = state.n_beads
    if n < 4:
        raise InvalidArgument("crankshaft needs at least 4 beads")
    i = int(rng.integers(0, n - 2))
    j = int(rng.integers(i + 2, n))
    angle = float(rng.uniform(0.0, 2.0 * math.pi))
    x = np.array(state.positions)
    axis = x[j] - x[i]
    norm = float(np.linalg.norm(axis))
    if norm < 1e-12:
        return state, False
    axis /= norm
    seg = x[i + 1:j] - x[i]
    c, s = math.cos(angle), math.sin(angle)
    rotated = (c * seg + s * np.cross(axis, seg)
               + (1.0 - c) * np.outer(seg @ axis, axis))
    x_new = x.copy()
    x_new[i + 1:j] = x[i] + rotated
    d2 = np.sum((x_new[:, None, :] - x_new[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    idx = np.arange(n - 1)
    d2[idx, idx + 1] = np.inf
    d2[idx + 1, idx] = np.inf
    if float(d2.min()) < min_separation * min_separation:
        return state, False
    return ChainState(positions=x_new, velocities=np.array(state.velocities),
                      params=state.params, seed=state.seed), True


def _bending_energy(x: np.ndarray, k_bend: float) -> float:
    if x.shape[0] < 3 or k_bend == 0.0:
        return 0.0
    u1 = x[:-2] - x[1:-1]
    u2 = x[2:] - x[1:-1]
    cos_t = np.einsum("ij,ij->i", u1, u2) / (
        np.linalg.norm(u1, axis=1) * np.linalg.norm(u2, axis=1))
    return float(k_bend * np.sum(1.0 + cos_t))


def metropolis_crankshaft_sweep(state: ChainState, rng: np.random.Generator,
                                n_moves: int | None = None,
                                local_energy: bool = False) -> tuple[ChainState, int]:
    """Crankshaft sweep with Metropolis acceptance on the energy change.

    Bond lengths are invariant under the move, so this samples the
    fixed-bond conformational ensemble (bending + excluded volume) and
    decorrelates configurations far faster than the Langevin integrator.
    With ``local_energy`` the acceptance uses the bending terms only (a
    rigid sub-segment rotation changes just the two pivot angles); the
    soft WCA shell is ignored, which is fine for candidate propagation
    though not for exact sampling.  Returns (state, accepted move count).
    """
    n_moves = n_moves if n_moves is not None else state.n_beads
    current = state
    if local_energy:
        e_cur = _bending_energy(np.array(current.positions), current.params.k_bend)
    else:
        _, e_cur, _ = compute_forces(np.array(current.positions), current.params)
    accepted = 0
    beta = math.inf if current.params.temperature == 0 else 1.0 / current.params.temperature
    for _ in range(n_moves):
        proposal, ok = crankshaft_move(current, rng)
        if not ok:
            continue
        if local_energy:
            e_new = _bending_energy(np.array(proposal.positions), proposal.params.k_bend)
        else:
            _, e_new, _ = compute_forces(np.array(proposal.positions), proposal.params)
        delta = e_new - e_cur
        if delta <= 0 or rng.random() < math.exp(-min(beta * delta, 700.0)):
            current = proposal
            e_cur = e_new
            accepted += 1
    return current, accepted


def tangent_correlations(positions: np.ndarray, max_lag: int) -> np.ndarray:
    """Mean cos(angle) between bond vectors ``s`` bonds apart, s = 1..max_lag."""
    bonds = np.diff(positions, axis=0)
    bonds /= np.linalg.norm(bonds, axis=1, keepdims=True)
    out = np.empty(max_lag)
    for s in range(1, max_lag + 1):
        out[s - 1] = float(np.mean(np.einsum("ij,ij->i", bonds[:-s], bonds[s:])))
    return out


def measure_persistence_length(params: ChainParams, n: int = 120,
                               n_samples: int = 2600, seed: int = 1,
                               max_lag: int = 6) -> float:
    """Persistence length (in sigma) from an equilibrium tangent-correlation fit.

    Samples the fixed-bond conformational ensemble (bending energy plus the
    hard-core constraint) by Metropolis crankshaft sweeps: bond lengths are
    pinned at the FENE+WCA minimum, which leaves tangent statistics
    untouched while making decorrelation orders of magnitude cheaper than
    integrating.  The fit uses short lags only, where the decay is
    exponential before excluded-volume swelling distorts it.
    """
    state = init_chain(n, "coil", params, seed=seed)
    rng = np.random.default_rng(seed)
    for _ in range(60):
        state, _ = metropolis_crankshaft_sweep(state, rng, local_energy=True)
    acc = np.zeros(max_lag)
    bond_sum = 0.0
    for _ in range(n_samples):
        state, _ = metropolis_crankshaft_sweep(state, rng, local_energy=True)
        state, _ = metropolis_crankshaft_sweep(state, rng, local_energy=True)
        acc += tangent_correlations(state.positions, max_lag)
        bond_sum += float(np.mean(np.linalg.norm(np.diff(state.positions, axis=0), axis=1)))
    corr = acc / n_samples
    mean_bond = bond_sum / n_samples
    lags = np.arange(1, max_lag + 1, dtype=float)
    good = corr > 0.05
    if good.sum() < 3:
        raise CalibrationFailure("tangent correlations decay too fast to fit")
    slope = float(np.polyfit(lags[good], np.log(corr[good]), 1)[0])
    if slope >= 0:
        raise CalibrationFailure("non-decaying tangent correlations")
    return -mean_bond / slope


def calibrate_bending(target_lp: float, params: ChainParams | None = None,
                      tolerance: float = 0.10, max_iterations: int = 6,
                      seed: int = 1, **measure_kwargs) -> float:
    """Bending constant whose measured persistence length matches the target.

    Secant iteration on ``k_bend``; raises CalibrationFailure when the
    relative error stays above ``tolerance``.
    """
    if target_lp < 0:
        raise InvalidArgument("target persistence length must be >= 0")
    if target_lp == 0:
        return 0.0
    base = params or ChainParams()
    bond = equilibrium_bond_length(base)
    k = target_lp * base.temperature / bond   # worm-like chain first guess
    history = []
    for _ in range(max_iterations):
        lp = measure_persistence_length(replace(base, k_bend=k), seed=seed,
                                        **measure_kwargs)
        history.append((k, lp))
        if abs(lp - target_lp) <= tolerance * target_lp:
            return k
        if len(history) >= 2:
            (k0, l0), (k1, l1) = history[-2], history[-1]
            if abs(l1 - l0) > 1e-9:
                k = max(0.1, k1 + (target_lp - l1) * (k1 - k0) / (l1 - l0))
                continue
        k *= target_lp / lp
    raise CalibrationFailure(
        f"persistence length {history[-1][1]:.2f} vs target {target_lp} after "
        f"{max_iterations} iterations")
