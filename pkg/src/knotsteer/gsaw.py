"""Growing self-avoiding tangent-sphere walks with pluggable angle models.

Beads have unit radius: bonded centres sit exactly 2 apart (tangency) and,
under the strict policy, non-bonded centres may never come closer than 2.
New beads are placed from a bending angle theta (the vertex angle at the
last bead; pi continues straight) and a dihedral phi in [0, 2pi), using the
same angle conventions as :func:`knotsteer.ingest.angles_from_coordinates`,
so placement and measurement are exact inverses.

Overlap checks go through a spatial hash with cell size one bond length;
decisions agree exactly with the brute-force all-pairs test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .geometry import PolyCurve

BOND_LENGTH = 2.0
BEAD_RADIUS = 1.0
DEFAULT_MAX_ATTEMPTS = 50

# Gaussian bending spread giving a persistence length of 10 beads:
# <cos(pi - theta)> = exp(-s^2 / 2) = exp(-1/10)
SEMIFLEXIBLE_DEFAULT_VARIANCE = 0.2

_CELL = BOND_LENGTH


@dataclass(frozen=True)
class AnglePair:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise InvalidArgument(f"theta out of [0, pi]: {self.theta}")
        if not (0.0 <= self.phi < 2.0 * math.pi + 1e-12):
            raise InvalidArgument(f"phi out of [0, 2pi): {self.phi}")


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _fallback_normal(e: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(e)))] = 1.0
    return _unit(np.cross(e, axis))


def place_bead(last3, pair: AnglePair, bond_length: float = BOND_LENGTH) -> np.ndarray:
    """Place the next centre from the previous three and an angle pair.

    With points (A, B, C): the new bond leaves C with vertex angle theta at
    C and dihedral phi about the B->C axis.  The frame is e2 = unit(C - B),
    k = unit((B - A) x (C - B)), m = k x e2; the new bond is
    ``L (cos(pi - theta) e2 + sin(pi - theta)(cos(phi) m + sin(phi) k))``.
    Collinear inputs fall back to a deterministic perpendicular k.
    """
    a, b, c = (np.asarray(q, dtype=np.float64) for q in last3)
    b1 = b - a
    b2 = c - b
    e2 = _unit(b2)
    normal = np.cross(b1, b2)
    norm = np.linalg.norm(normal)
    if norm < 1e-12 * np.linalg.norm(b1) * np.linalg.norm(b2):
        k = _fallback_normal(e2)
    else:
        k = normal / norm
    m = np.cross(k, e2)
    gamma = math.pi - pair.theta
    step = (math.cos(gamma) * e2
            + math.sin(gamma) * (math.cos(pair.phi) * m + math.sin(pair.phi) * k))
    return c + bond_length * step


def place_third_bead(first2, theta: float, bond_length: float = BOND_LENGTH) -> np.ndarray:
    """Third bead: bending angle only, in a deterministic fallback plane."""
    b, c = (np.asarray(q, dtype=np.float64) for q in first2)
    e2 = _unit(c - b)
    k = _fallback_normal(e2)
    m = np.cross(k, e2)
    gamma = math.pi - theta
    return c + bond_length * (math.cos(gamma) * e2 + math.sin(gamma) * m)


class UniformAngles:
    """Freely jointed: new bond direction uniform on the sphere."""

    name = "uniform"

    def draw(self, rng) -> AnglePair:
        gamma = math.acos(float(rng.uniform(-1.0, 1.0)))
        return AnglePair(theta=math.pi - gamma,
                         phi=float(rng.uniform(0.0, 2.0 * math.pi)))


@dataclass(frozen=True)
class SemiflexibleAngles:
    """Gaussian bending angle about pi (truncated), uniform dihedral."""

    variance: float = SEMIFLEXIBLE_DEFAULT_VARIANCE
    name: str = "unbiased"

    def __post_init__(self):
        if self.variance <= 0:
            raise InvalidArgument("variance must be positive")

    def draw(self, rng) -> AnglePair:
        s = math.sqrt(self.variance)
        while True:
            dev = abs(float(rng.normal(0.0, s)))
            if dev <= math.pi:
                break
        return AnglePair(theta=math.pi - dev,
                         phi=float(rng.uniform(0.0, 2.0 * math.pi)))


@dataclass(frozen=True)
class EmpiricalAngles:
    """Draws correlated (theta, phi) rows from an angle dataset."""

    theta: np.ndarray
    phi: np.ndarray
    name: str = "protein"

    def __post_init__(self):
        if self.theta.shape != self.phi.shape or self.theta.size == 0:
            raise InvalidArgument("empirical model needs matching non-empty angle arrays")

    @classmethod
    def from_dataset(cls, dataset, subset: str = "full") -> "EmpiricalAngles":
        if subset == "full":
            mask = np.ones(dataset.theta.shape, dtype=bool)
            name = "protein"
        elif subset == "no_helices":
            mask = ~dataset.helical
            name = "protein_no_helix"
        elif subset == "only_helices":
            mask = dataset.helical
            name = "protein_only_helix"
        else:
            raise InvalidArgument(f"unknown subset {subset!r}")
        if not np.any(mask):
            raise InvalidArgument(f"subset {subset!r} selects no angle pairs")
        return cls(theta=dataset.theta[mask].copy(), phi=dataset.phi[mask].copy(),
                   name=name)

    def draw(self, rng) -> AnglePair:
        i = int(rng.integers(self.theta.size))
        return AnglePair(theta=float(self.theta[i]), phi=float(self.phi[i]))


def _cell_of(point: np.ndarray) -> tuple[int, int, int]:
    return (int(math.floor(point[0] / _CELL)),
            int(math.floor(point[1] / _CELL)),
            int(math.floor(point[2] / _CELL)))


class GrowthState:
    """Mutable walk state: bead centres, spatial hash, termination flag."""

    __slots__ = ("points", "cells", "policy", "max_attempts", "status",
                 "overlap_count", "trapped_length")

    def __init__(self, points=None, policy: str = "strict",
                 max_attempts: int = DEFAULT_MAX_ATTEMPTS):
        if policy not in ("strict", "weak"):
            raise InvalidArgument(f"unknown overlap policy {policy!r}")
        if points is None:
            points = [np.zeros(3), np.array([BOND_LENGTH, 0.0, 0.0])]
        self.points = [np.asarray(p, dtype=np.float64).copy() for p in points]
        self.policy = policy
        self.max_attempts = int(max_attempts)
        self.status = "growing"
        self.overlap_count = 0
        self.trapped_length = None
        self.cells: dict[tuple[int, int, int], list[int]] = {}
        for idx, p in enumerate(self.points):
            self.cells.setdefault(_cell_of(p), []).append(idx)

    @property
    def n_beads(self) -> int:
        return len(self.points)

    def copy(self) -> "GrowthState":
        clone = GrowthState.__new__(GrowthState)
        clone.points = [p.copy() for p in self.points]
        clone.cells = {k: list(v) for k, v in self.cells.items()}
        clone.policy = self.policy
        clone.max_attempts = self.max_attempts
        clone.status = self.status
        clone.overlap_count = self.overlap_count
        clone.trapped_length = self.trapped_length
        return clone

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            setattr(self, name, value)

    def curve(self) -> PolyCurve:
        return PolyCurve(np.array(self.points), bead_radius=BEAD_RADIUS)

    def overlaps(self, candidate: np.ndarray, tol: float = 1e-9) -> bool:
        """True when the candidate centre sits closer than one diameter to
        any bead other than the current chain end."""
        cx, cy, cz = _cell_of(candidate)
        last = self.n_beads - 1
        limit = (BOND_LENGTH - tol) ** 2
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    bucket = self.cells.get((cx + dx, cy + dy, cz + dz))
                    if not bucket:
                        continue
                    for idx in bucket:
                        if idx == last:
                            continue
                        d = self.points[idx] - candidate
                        if float(d @ d) < limit:
                            return True
        return False

    def overlaps_bruteforce(self, candidate: np.ndarray, tol: float = 1e-9) -> bool:
        limit = (BOND_LENGTH - tol) ** 2
        pts = np.array(self.points[:-1])
        d2 = np.sum((pts - candidate) ** 2, axis=1)
        return bool(np.any(d2 < limit))

    def _append(self, point: np.ndarray) -> None:
        idx = len(self.points)
        self.points.append(point.copy())
        self.cells.setdefault(_cell_of(point), []).append(idx)

    def propose(self, pair: AnglePair) -> np.ndarray:
        if self.n_beads == 2:
            return place_third_bead(self.points[-2:], pair.theta)
        return place_bead(self.points[-3:], pair)


def grow(state: GrowthState, model, n_new: int, rng,
         max_attempts: int | None = None) -> GrowthState:
    """Add up to ``n_new`` beads, drawing angle pairs from the model.

    Mutates and returns ``state``.  When every attempt for a bead overlaps:
    the strict policy marks the walk trapped and stops; the weak policy
    places the final candidate anyway and counts the overlap.
    """
    if n_new < 1:
        raise InvalidArgument("need n_new >= 1")
    if state.status != "growing":
        return state
    attempts_budget = max_attempts if max_attempts is not None else state.max_attempts
    for _ in range(n_new):
        placed = False
        candidate = None
        for _attempt in range(attempts_budget):
            candidate = state.propose(model.draw(rng))
            if not state.overlaps(candidate):
                state._append(candidate)
                placed = True
                break
        if not placed:
            if state.policy == "strict":
                state.status = "trapped"
                state.trapped_length = state.n_beads
                return state
            state.overlap_count += 1
            state._append(candidate)
    return state


def semiflexible_model(variance: float = SEMIFLEXIBLE_DEFAULT_VARIANCE) -> SemiflexibleAngles:
    return SemiflexibleAngles(variance=variance)


def model_by_name(name: str, dataset=None):
    """CLI model registry; empirical variants need the angle dataset."""
    if name == "uniform":
        return UniformAngles()
    if name == "unbiased":
        return SemiflexibleAngles()
    if name in ("protein", "protein_no_helix", "protein_only_helix"):
        if dataset is None:
            raise InvalidArgument(f"model {name!r} needs the angle dataset")
        subset = {"protein": "full", "protein_no_helix": "no_helices",
                  "protein_only_helix": "only_helices"}[name]
        return EmpiricalAngles.from_dataset(dataset, subset)
    raise InvalidArgument(f"unknown angle model {name!r}")


MODEL_NAMES = ("unbiased", "protein", "protein_no_helix", "protein_only_helix", "uniform")
