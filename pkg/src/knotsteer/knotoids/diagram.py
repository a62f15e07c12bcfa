"""Gauss diagrams of curve projections.

A diagram is stored as the sequence of crossing visits met while walking the
strand: each visit is ``(crossing id, is_over, sign)``.  Every crossing id
appears exactly twice, once over and once under.  Open diagrams are anchored
at their endpoints (leg = start, head = end), so the visit sequence is *not*
defined up to cyclic rotation; closed diagrams are cyclic.

Crossing sign convention: at a crossing, let ``o`` and ``u`` be the 2D
direction vectors of the over- and under-strand segments in traversal order.
The sign is +1 when ``cross(o, u) > 0`` (under-strand crosses left-to-right
seen along the over-strand) and -1 otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateProjection, InvalidArgument
from ..geometry import PlanarDiagramGeometry

# visit = (crossing_id, over_flag, sign); a code is a tuple of visits
Visit = tuple[int, bool, int]

_PARAM_TOL = 1e-9
_DEPTH_TOL = 1e-9


@dataclass(frozen=True)
class Crossing:
    """One transversal self-intersection of a projected curve."""

    over_segment: int
    under_segment: int
    over_param: float     # position along the over segment in [0, 1]
    under_param: float
    sign: int
    point: tuple[float, float]


class GaussDiagram:
    """Sequence of crossing visits along a strand, open or closed."""

    __slots__ = ("code", "closed")

    def __init__(self, code, closed: bool = False):
        code = tuple((int(c), bool(o), int(s)) for c, o, s in code)
        counts: dict[int, list[bool]] = {}
        for c, o, s in code:
            if s not in (-1, 1):
                raise InvalidArgument(f"crossing sign must be +-1, got {s}")
            counts.setdefault(c, []).append(o)
        for c, flags in counts.items():
            if len(flags) != 2 or flags[0] == flags[1]:
                raise InvalidArgument(
                    f"crossing {c} must be visited exactly once over and once under")
        self.code = code
        self.closed = bool(closed)

    @classmethod
    def _trusted(cls, code, closed: bool) -> "GaussDiagram":
        """Construct without validation (internal move machinery only)."""
        d = object.__new__(cls)
        d.code = tuple(code)
        d.closed = closed
        return d

    @property
    def n_crossings(self) -> int:
        return len(self.code) // 2

    def __len__(self) -> int:
        return self.n_crossings

    def __eq__(self, other) -> bool:
        return (isinstance(other, GaussDiagram)
                and self.closed == other.closed and self.code == other.code)

    def __hash__(self) -> int:
        return hash((self.closed, self.code))

    def __repr__(self) -> str:
        kind = "closed" if self.closed else "open"
        body = ",".join(f"{c}{'o' if o else 'u'}{'+' if s > 0 else '-'}"
                        for c, o, s in self.code)
        return f"<{kind} diagram [{body}]>"

    def writhe(self) -> int:
        return sum(s for _, _, s in self.code) // 2

    def relabeled(self) -> "GaussDiagram":
        """Relabel crossings by first appearance along the strand."""
        mapping: dict[int, int] = {}
        out = []
        for c, o, s in self.code:
            m = mapping.get(c)
            if m is None:
                m = mapping[c] = len(mapping)
            out.append((m, o, s))
        return GaussDiagram._trusted(out, self.closed)

    def key(self) -> tuple:
        """Hashable canonical identity (relabelled code plus openness)."""
        mapping: dict[int, int] = {}
        out = []
        for c, o, s in self.code:
            m = mapping.get(c)
            if m is None:
                m = mapping[c] = len(mapping)
            out.append((m, o, s))
        return (self.closed, tuple(out))


def empty_diagram(closed: bool = False) -> GaussDiagram:
    return GaussDiagram((), closed=closed)


def _segment_arrays(geom: PlanarDiagramGeometry):
    pts = geom.points
    dep = geom.depth
    if geom.closed:
        a = pts
        b = np.roll(pts, -1, axis=0)
        da = dep
        db = np.roll(dep, -1)
    else:
        a, b = pts[:-1], pts[1:]
        da, db = dep[:-1], dep[1:]
    return a, b, da, db


def find_crossings(geom: PlanarDiagramGeometry) -> list[Crossing]:
    """All transversal intersections between non-adjacent segments.

    Raises DegenerateProjection when the projection is not in generic
    position: coincident projected vertices, near-parallel overlaps,
    intersections within tolerance of a vertex, triple points, or equal
    interpolated depths.
    """
    a, b, da, db = _segment_arrays(geom)
    n_seg = a.shape[0]
    if n_seg < 2:
        return []
    seg = b - a
    seg_len = np.linalg.norm(seg, axis=1)
    if np.any(seg_len < 1e-12):
        raise DegenerateProjection("projected segment of zero length")

    i_idx, j_idx = np.triu_indices(n_seg, k=2)
    if geom.closed and n_seg > 2:
        keep = ~((i_idx == 0) & (j_idx == n_seg - 1))
        i_idx, j_idx = i_idx[keep], j_idx[keep]
    if i_idx.size == 0:
        return []

    # Bounding-box prefilter keeps the exact solve on a small pair set.
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    boxed = ~((lo[i_idx, 0] > hi[j_idx, 0]) | (lo[j_idx, 0] > hi[i_idx, 0]) |
              (lo[i_idx, 1] > hi[j_idx, 1]) | (lo[j_idx, 1] > hi[i_idx, 1]))
    i_idx, j_idx = i_idx[boxed], j_idx[boxed]
    if i_idx.size == 0:
        return []

    d1 = seg[i_idx]
    d2 = seg[j_idx]
    q = a[j_idx] - a[i_idx]
    denom = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    scale = seg_len[i_idx] * seg_len[j_idx]
    parallel = np.abs(denom) <= 1e-14 * scale
    safe = np.where(parallel, 1.0, denom)
    t = (q[:, 0] * d2[:, 1] - q[:, 1] * d2[:, 0]) / safe
    s = (q[:, 0] * d1[:, 1] - q[:, 1] * d1[:, 0]) / safe

    inner = (~parallel & (t > _PARAM_TOL) & (t < 1.0 - _PARAM_TOL)
             & (s > _PARAM_TOL) & (s < 1.0 - _PARAM_TOL))
    touching = (~parallel & ~inner
                & (t > -_PARAM_TOL) & (t < 1.0 + _PARAM_TOL)
                & (s > -_PARAM_TOL) & (s < 1.0 + _PARAM_TOL))
    if np.any(touching):
        raise DegenerateProjection("intersection within tolerance of a vertex")
    if np.any(parallel):
        # Parallel segments are degenerate only if they actually overlap.
        pi = i_idx[parallel]
        pj = j_idx[parallel]
        qq = q[parallel]
        dd = d1[parallel]
        off = np.abs(qq[:, 0] * dd[:, 1] - qq[:, 1] * dd[:, 0]) / seg_len[pi]
        if np.any(off < 1e-9 * seg_len[pj]):
            raise DegenerateProjection("near-collinear overlapping segments")

    ii = i_idx[inner]
    jj = j_idx[inner]
    tt = t[inner]
    ss = s[inner]
    if ii.size == 0:
        return []

    h1 = da[ii] + tt * (db[ii] - da[ii])
    h2 = da[jj] + ss * (db[jj] - da[jj])
    if np.any(np.abs(h1 - h2) < _DEPTH_TOL):
        raise DegenerateProjection("strands at equal depth at a crossing")
    first_over = h1 > h2
    cross_sign = np.where(denom[inner] > 0, 1, -1)

    # A triple point shows up as two crossings at nearly equal parameter
    # on one segment.
    events: dict[int, list[float]] = {}
    for k in range(ii.size):
        events.setdefault(int(ii[k]), []).append(float(tt[k]))
        events.setdefault(int(jj[k]), []).append(float(ss[k]))
    for params in events.values():
        params.sort()
        for u, w in zip(params, params[1:]):
            if w - u < _PARAM_TOL:
                raise DegenerateProjection("two crossings coincide on a segment")

    px = a[ii] + tt[:, None] * d1[inner]
    out = []
    for k in range(ii.size):
        if first_over[k]:
            over_seg, under_seg = int(ii[k]), int(jj[k])
            over_par, under_par = float(tt[k]), float(ss[k])
            sgn = int(cross_sign[k])
        else:
            over_seg, under_seg = int(jj[k]), int(ii[k])
            over_par, under_par = float(ss[k]), float(tt[k])
            # sign is cross(over_dir, under_dir); swapping operands flips it
            sgn = -int(cross_sign[k])
        out.append(Crossing(over_segment=over_seg, under_segment=under_seg,
                            over_param=over_par, under_param=under_par,
                            sign=sgn, point=(float(px[k, 0]), float(px[k, 1]))))
    return out


def _perturbed(direction: np.ndarray, rng, max_angle: float = 1e-4) -> np.ndarray:
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    angle = max_angle * (0.5 + 0.5 * rng.random())
    # Rodrigues rotation of the direction about a random axis
    d = direction
    rotated = (d * math.cos(angle) + np.cross(axis, d) * math.sin(angle)
               + axis * np.dot(axis, d) * (1.0 - math.cos(angle)))
    return rotated / np.linalg.norm(rotated)


def extract_for_direction(curve, direction, rng=None, closed: bool = False,
                          max_retries: int = 5) -> GaussDiagram:
    """Project and extract, nudging the direction past degenerate positions.

    Each retry rotates the direction by at most 1e-4 rad; after
    ``max_retries`` failures the DegenerateProjection propagates.
    """
    from ..geometry import project

    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    if rng is None:
        rng = np.random.default_rng(0)
    last_error = None
    for _ in range(max_retries + 1):
        try:
            return extract_diagram(project(curve, d, closed=closed))
        except DegenerateProjection as exc:
            last_error = exc
            d = _perturbed(d, rng)
    raise last_error


def extract_diagram(geom: PlanarDiagramGeometry) -> GaussDiagram:
    """Build the Gauss diagram of a projected curve in generic position."""
    crossings = find_crossings(geom)
    visits: list[tuple[float, int, bool, int]] = []  # (order key, id, over, sign)
    n_seg = geom.n_vertices if geom.closed else geom.n_vertices - 1
    for cid, c in enumerate(crossings):
        visits.append((c.over_segment + c.over_param, cid, True, c.sign))
        visits.append((c.under_segment + c.under_param, cid, False, c.sign))
    visits.sort(key=lambda rec: rec[0])
    if visits and visits[-1][0] >= n_seg:
        raise DegenerateProjection("crossing parameter out of range")
    code = [(cid, over, sign) for _, cid, over, sign in visits]
    return GaussDiagram(code, closed=geom.closed).relabeled()
