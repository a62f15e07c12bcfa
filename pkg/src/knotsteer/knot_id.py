"""Knot type of an open curve by stochastic closure.

Each closure direction extends both endpoints along parallel rays to a
sphere of radius three curve diameters around the centroid and joins the
hit points with a great arc.  The closed curve is projected, reduced, and
classified by its determinant (integer, exact) with a bracket-polynomial
fingerprint as tie-break.  Families follow the usual split: torus knots
3_1, 5_1, 7_1; twist knots 4_1, 5_2, 6_1, 7_2 (the trefoil is counted as
torus, not twist); connected sums are composite.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import ComplexityLimit, DegenerateProjection, InvalidArgument
from .geometry import PolyCurve, sample_directions
from .knotoids.bracket import fingerprint
from .knotoids.diagram import GaussDiagram, extract_for_direction
from .knotoids.moves import deep_simplify

UNKNOT_NAME = "0_1"
OTHER_NAME = "other"

TORUS_KNOTS = {"3_1", "5_1", "7_1"}
TWIST_KNOTS = {"4_1", "5_2", "6_1", "7_2"}

# bracket cost is 2^crossings; beyond this a unique determinant match is
# accepted without fingerprint confirmation
FINGERPRINT_BUDGET = 14


@dataclass(frozen=True)
class KnotType:
    name: str
    determinant: int
    fingerprint: str
    family: str
    source: str = "derived"

    @property
    def is_unknot(self) -> bool:
        return self.name == UNKNOT_NAME


UNKNOWN_TYPE = KnotType(name=OTHER_NAME, determinant=0, fingerprint="", family="other")


def classify_family(knot: KnotType | str) -> str:
    name = knot.name if isinstance(knot, KnotType) else knot
    if name == UNKNOT_NAME:
        return "unknot"
    if "#" in name:
        return "composite"
    if name in TORUS_KNOTS:
        return "torus"
    if name in TWIST_KNOTS:
        return "twist"
    return "other"


class KnotTable:
    """Fingerprint-and-determinant keyed lookup of closed-curve knot types."""

    def __init__(self, entries):
        self.entries = list(entries)
        self._by_det: dict[int, list[KnotType]] = {}
        self._by_fp: dict[str, KnotType] = {}
        for e in self.entries:
            self._by_det.setdefault(e.determinant, []).append(e)
            if e.fingerprint:
                if e.fingerprint in self._by_fp:
                    raise InvalidArgument(f"duplicate knot fingerprint for {e.name}")
                self._by_fp[e.fingerprint] = e

    def __len__(self) -> int:
        return len(self.entries)

    def candidates(self, determinant: int) -> list[KnotType]:
        return self._by_det.get(determinant, [])

    def by_fingerprint(self, key: str) -> KnotType | None:
        return self._by_fp.get(key)


def write_knot_table(path, entries, version: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# knot table version {version}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "determinant", "fingerprint", "family", "source"])
        for e in entries:
            writer.writerow([e.name, e.determinant, e.fingerprint, e.family, e.source])


def read_knot_table(path_or_file) -> KnotTable:
    def parse(fh):
        entries = []
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        if header != ["name", "determinant", "fingerprint", "family", "source"]:
            raise InvalidArgument(f"unexpected knot table header {header}")
        for name, det, fp, family, source in rows:
            entries.append(KnotType(name=name, determinant=int(det),
                                    fingerprint=fp, family=family, source=source))
        return KnotTable(entries)

    if hasattr(path_or_file, "read"):
        return parse(path_or_file)
    with open(path_or_file, "r", encoding="utf-8") as fh:
        return parse(fh)


@lru_cache(maxsize=1)
def bundled_knot_table() -> KnotTable:
    ref = resources.files("knotsteer").joinpath("data/knot_table.csv")
    with ref.open("r", encoding="utf-8") as fh:
        return read_knot_table(fh)


def _integer_determinant(matrix: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [row[:] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def coloring_matrix(diagram: GaussDiagram) -> list[list[int]]:
    """Crossing/arc relation matrix: 2 * over = under_in + under_out.

    Arcs are the maximal strand runs between underpasses of the closed
    diagram; row c has +1 at the incoming and outgoing under-arcs and -2 at
    the over-arc of crossing c.
    """
    if not diagram.closed:
        raise InvalidArgument("determinant requires a closed diagram")
    code = diagram.code
    n = diagram.n_crossings
    if n == 0:
        return []
    unders = [p for p, (c, o, s) in enumerate(code) if not o]

    def arc_of(position: int) -> int:
        return bisect_left(unders, position) % n

    rows = []
    passes: dict[int, dict] = {}
    for p, (cid, over, _s) in enumerate(code):
        passes.setdefault(cid, {})["over" if over else "under"] = p
    for cid in sorted(passes):
        p_over = passes[cid]["over"]
        p_under = passes[cid]["under"]
        k = arc_of(p_under)          # incoming arc ends at the underpass
        row = [0] * n
        row[k] += 1
        row[(k + 1) % n] += 1
        row[arc_of(p_over)] -= 2
        rows.append(row)
    return rows


def knot_determinant(diagram: GaussDiagram) -> int:
    """|Alexander polynomial at -1| of a closed diagram."""
    rows = coloring_matrix(diagram)
    if not rows:
        return 1
    minor = [row[:-1] for row in rows[:-1]]
    return abs(_integer_determinant(minor))


def knot_invariants(diagram: GaussDiagram,
                    budget: int = FINGERPRINT_BUDGET) -> tuple[int, str]:
    """(determinant, bracket fingerprint) of a closed diagram."""
    reduced = deep_simplify(diagram)
    det = knot_determinant(reduced)
    key = fingerprint(reduced, budget=budget)  # raises ComplexityLimit over budget
    return det, key


def classify_closed_diagram(diagram: GaussDiagram,
                            table: KnotTable | None = None) -> KnotType:
    """Name a closed diagram via determinant-first lookup."""
    if table is None:
        table = bundled_knot_table()
    reduced = deep_simplify(diagram)
    if reduced.n_crossings == 0:
        return table.candidates(1)[0]
    det = knot_determinant(reduced)
    candidates = table.candidates(det)
    if not candidates:
        return UNKNOWN_TYPE
    if reduced.n_crossings > FINGERPRINT_BUDGET:
        if len(candidates) == 1:
            return candidates[0]
        return UNKNOWN_TYPE
    try:
        key = fingerprint(reduced, budget=FINGERPRINT_BUDGET)
    except ComplexityLimit:
        return candidates[0] if len(candidates) == 1 else UNKNOWN_TYPE
    for cand in candidates:
        if cand.fingerprint == key:
            return cand
    return UNKNOWN_TYPE


def close_curve(curve: PolyCurve, ray_direction, radius_factor: float = 3.0,
                max_arc_step: float = 0.35) -> np.ndarray:
    """Close an open curve along a ray direction; returns closed vertices.

    Both endpoints are extended parallel to ``ray_direction`` until they hit
    a sphere of ``radius_factor`` curve diameters centred on the centroid,
    then joined by a great arc sampled finely enough that its chords stay
    far outside the curve body.
    """
    w = np.asarray(ray_direction, dtype=np.float64)
    w = w / np.linalg.norm(w)
    v = curve.vertices
    center = curve.centroid()
    radius = radius_factor * max(curve.diameter(), 1e-6)

    def hit(point: np.ndarray) -> np.ndarray:
        rel = point - center
        b = float(np.dot(rel, w))
        disc = b * b - (float(np.dot(rel, rel)) - radius * radius)
        t = -b + math.sqrt(max(disc, 0.0))
        return point + t * w

    p_head = hit(v[-1])
    p_leg = hit(v[0])
    u1 = (p_head - center) / radius
    u0 = (p_leg - center) / radius
    dot = float(np.clip(np.dot(u1, u0), -1.0, 1.0))
    omega = math.acos(dot)
    arc = []
    if omega > 1e-9:
        n_steps = max(2, int(math.ceil(omega / max_arc_step)))
        if dot < -0.999999:
            # nearly antipodal: bend through a deterministic midpoint
            helper = np.zeros(3)
            helper[int(np.argmin(np.abs(u1)))] = 1.0
            mid = np.cross(u1, helper)
            mid /= np.linalg.norm(mid)
            arc_pts_a = _slerp(u1, mid, max(1, n_steps // 2))
            arc_pts_b = _slerp(mid, u0, max(1, n_steps // 2))
            arc = [center + radius * u for u in arc_pts_a + [mid] + arc_pts_b]
        else:
            arc = [center + radius * u for u in _slerp(u1, u0, n_steps)]
    closed = np.vstack([v, [p_head], arc, [p_leg]])
    return closed


def _slerp(u1: np.ndarray, u0: np.ndarray, n_steps: int) -> list[np.ndarray]:
    dot = float(np.clip(np.dot(u1, u0), -1.0, 1.0))
    omega = math.acos(dot)
    if omega < 1e-12:
        return []
    s = math.sin(omega)
    return [(math.sin((1 - f) * omega) * u1 + math.sin(f * omega) * u0) / s
            for f in np.linspace(0, 1, n_steps + 1)[1:-1]]


@dataclass(frozen=True)
class KnotDistribution:
    fractions: dict[str, float]
    dominant: str
    n_closures: int

    def fraction(self, name: str) -> float:
        return self.fractions.get(name, 0.0)


def stochastic_closure(curve: PolyCurve, n_closures: int = 100, seed=0,
                       table: KnotTable | None = None) -> KnotDistribution:
    """Knot-type frequencies over random parallel-ray closures."""
    if n_closures < 1:
        raise InvalidArgument("need at least one closure")
    if table is None:
        table = bundled_knot_table()
    ray_dirs = sample_directions(n_closures, "uniform_random", seed=seed)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0x7FFFFFFF, 0xC105]))
    counts: dict[str, int] = {}
    for k in range(n_closures):
        closed_pts = close_curve(curve, ray_dirs[k])
        closed_curve = PolyCurve(closed_pts)
        proj = rng.standard_normal(3)
        proj /= np.linalg.norm(proj)
        try:
            diag = extract_for_direction(closed_curve, proj, rng, closed=True)
            name = classify_closed_diagram(diag, table).name
        except (DegenerateProjection, ComplexityLimit):
            name = OTHER_NAME
        counts[name] = counts.get(name, 0) + 1
    fractions = {name: c / n_closures for name, c in sorted(counts.items())}
    dominant = max(sorted(counts), key=lambda nm: counts[nm])
    return KnotDistribution(fractions=fractions, dominant=dominant,
                            n_closures=n_closures)
