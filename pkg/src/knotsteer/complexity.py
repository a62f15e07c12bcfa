"""Monte Carlo estimators of curve complexity from knotoid projections.

The average unravelling number of a curve is the mean of the unravelling
number over its sampled spherical projections (a normalised average: the
integral over the sphere divided by its area).  The total unravelling
number integrates that average over the triangle of subchains, approximated
on a stride grid that always includes the full chain.

Directions come from a fibonacci lattice rotated by a seed-derived random
rotation: evaluations are deterministic and low-variance per seed, which is
what candidate comparison during steering needs; independent-sample
statistics should use ``scheme="uniform_random"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjection, InvalidArgument, NumericalDegeneracy
from .geometry import PolyCurve, SubchainSpec, random_rotation, sample_directions, trim
from .knotoids.diagram import extract_for_direction
from .knotoids.table import KnotoidTable, KnotoidType, bundled_table, classify

DEFAULT_STEERING_DIRS = 64
DEFAULT_REPORT_DIRS = 500
DEFAULT_STRIDE = 4
_MAX_DEGENERATE_FRACTION = 0.01


@dataclass(frozen=True)
class ComplexityEstimate:
    value: float
    stderr: float
    n_samples: int
    unclassified_fraction: float


@dataclass(frozen=True)
class KnotoidDistribution:
    weights: dict[str, float]
    n_samples: int

    def weight(self, name: str) -> float:
        return self.weights.get(name, 0.0)

    def nontrivial_weight(self) -> float:
        return 1.0 - self.weight("trivial")


def directions_for_seed(n_dirs: int, seed, scheme: str = "fibonacci") -> np.ndarray:
    """Direction set used by the estimators; deterministic in the seed."""
    if scheme == "fibonacci":
        base = sample_directions(n_dirs, "fibonacci")
        return base @ random_rotation(seed).T
    return sample_directions(n_dirs, scheme, seed=seed)


def _classified_projections(curve: PolyCurve, dirs: np.ndarray, seed,
                            table: KnotoidTable) -> list[KnotoidType]:
    rng = np.random.default_rng(np.random.SeedSequence([_entropy(seed), 0xD15C]))
    results: list[KnotoidType] = []
    failures = 0
    for d in dirs:
        try:
            diagram = extract_for_direction(curve, d, rng)
        except DegenerateProjection:
            failures += 1
            if failures > max(1, _MAX_DEGENERATE_FRACTION * len(dirs)):
                raise NumericalDegeneracy(
                    f"{failures} of {len(dirs)} directions stayed degenerate")
            continue
        results.append(classify(diagram, table))
    if not results:
        raise NumericalDegeneracy("no classifiable projections")
    return results


def _entropy(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed) & 0x7FFFFFFFFFFF
    import zlib

    return zlib.crc32(repr(seed).encode("utf-8"))


def knotoid_spectrum(curve: PolyCurve, n_dirs: int = DEFAULT_REPORT_DIRS, seed=0,
                     scheme: str = "fibonacci",
                     table: KnotoidTable | None = None) -> KnotoidDistribution:
    """Normalised knotoid type frequencies over sampled projections."""
    if n_dirs < 1:
        raise InvalidArgument("need at least one direction")
    table = table if table is not None else bundled_table()
    dirs = directions_for_seed(n_dirs, seed, scheme)
    types = _classified_projections(curve, dirs, seed, table)
    weights: dict[str, float] = {}
    for t in types:
        weights[t.name] = weights.get(t.name, 0.0) + 1.0
    total = sum(weights.values())
    return KnotoidDistribution(
        weights={k: v / total for k, v in sorted(weights.items())},
        n_samples=len(types))


def aun(curve: PolyCurve, n_dirs: int = DEFAULT_STEERING_DIRS, seed=0,
        scheme: str = "fibonacci",
        table: KnotoidTable | None = None) -> ComplexityEstimate:
    """Mean unravelling number over sampled projection directions.

    Unclassified projections contribute their heuristic bound; their weight
    is reported so callers can judge how much of the signal is heuristic.
    """
    if n_dirs < 2:
        raise InvalidArgument("need at least two directions for a stderr")
    table = table if table is not None else bundled_table()
    dirs = directions_for_seed(n_dirs, seed, scheme)
    types = _classified_projections(curve, dirs, seed, table)
    values = np.array([t.unravelling for t in types], dtype=float)
    unclassified = sum(1 for t in types if not t.classified)
    n = len(values)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ComplexityEstimate(value=mean, stderr=stderr, n_samples=n,
                              unclassified_fraction=unclassified / n)


def subchain_grid(n_vertices: int, stride: int) -> list[SubchainSpec]:
    """Stride-spaced subchain pairs, always including the full chain."""
    if stride < 1:
        raise InvalidArgument("stride must be >= 1")
    specs = []
    marks = list(range(0, n_vertices, stride))
    if (n_vertices - 1) not in marks:
        marks.append(n_vertices - 1)
    for i, a in enumerate(marks):
        for b in marks[i:]:
            if b - a >= 2:
                specs.append(SubchainSpec(a, b))
    return specs


def tun(curve: PolyCurve, stride: int = DEFAULT_STRIDE,
        n_dirs: int = DEFAULT_STEERING_DIRS, seed=0,
        scheme: str = "fibonacci",
        table: KnotoidTable | None = None) -> ComplexityEstimate:
    """Subchain-integrated average unravelling number on a stride grid.

    Each grid point carries quadrature weight ``(stride / (n - 1))^2`` so the
    full-resolution limit approximates the integral over the subchain
    triangle ``0 <= a <= b <= 1``.
    """
    n = len(curve)
    if n < 3:
        raise InvalidArgument("TUN needs a curve of at least 3 vertices")
    table = table if table is not None else bundled_table()
    specs = subchain_grid(n, stride)
    cell = (stride / (n - 1)) ** 2
    total = 0.0
    var = 0.0
    samples = 0
    unclassified = 0.0
    weight_sum = 0.0
    for spec in specs:
        est = aun(trim(curve, spec), n_dirs=n_dirs, seed=seed, scheme=scheme,
                  table=table)
        total += cell * est.value
        var += (cell * est.stderr) ** 2
        samples += est.n_samples
        unclassified += cell * est.unclassified_fraction
        weight_sum += cell
    return ComplexityEstimate(value=total, stderr=math.sqrt(var),
                              n_samples=samples,
                              unclassified_fraction=unclassified / max(weight_sum, 1e-300))
