"""Constructors for reference space curves.

Everything here returns a :class:`~knotsteer.geometry.PolyCurve` (or a closed
vertex array) built from explicit coordinates: parametric knots, braid and
plat closures, twist regions, and random walks.  These feed the bundled data
assets and the test suite; none of it is on the simulation hot path.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgument
from .geometry import PolyCurve

_CROSS_LIFT = 0.35


def _resample(points: np.ndarray, spacing: float) -> np.ndarray:
    """Resample a polyline at roughly uniform arclength spacing."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    total = arclen[-1]
    n_out = max(2, int(round(total / spacing)) + 1)
    targets = np.linspace(0.0, total, n_out)
    out = np.empty((n_out, 3))
    for k in range(3):
        out[:, k] = np.interp(targets, arclen, points[:, k])
    return out


# parameter phases centred in the widest crossing-free interval, so trimming
# a gap around the cut never opens a crossing
_TREFOIL_CUT = 3.13
_FIG8_CUT = 3.14


def open_trefoil(n: int = 90, gap: float = 0.35, tails: int = 0,
                 tail_step: float = 0.5) -> PolyCurve:
    """Open trefoil from the classic (2, 3) torus parametrisation.

    ``gap`` trims the parameter interval so the endpoints do not touch;
    ``tails`` appends straight runs pointing away from the centroid, which
    buries the knot deep in the chain.
    """
    t = np.linspace(_TREFOIL_CUT + gap, _TREFOIL_CUT + 2.0 * math.pi - gap, n)
    pts = np.column_stack([
        np.sin(t) + 2.0 * np.sin(2.0 * t),
        np.cos(t) - 2.0 * np.cos(2.0 * t),
        -np.sin(3.0 * t),
    ])
    return _with_tails(pts, tails, tail_step)


def figure_eight_curve(n: int = 140, gap: float = 0.30, tails: int = 0,
                       tail_step: float = 0.5) -> PolyCurve:
    t = np.linspace(_FIG8_CUT + gap, _FIG8_CUT + 2.0 * math.pi - gap, n)
    pts = np.column_stack([
        (2.0 + np.cos(2.0 * t)) * np.cos(3.0 * t),
        (2.0 + np.cos(2.0 * t)) * np.sin(3.0 * t),
        np.sin(4.0 * t),
    ])
    return _with_tails(pts, tails, tail_step)


def _with_tails(pts: np.ndarray, tails: int, tail_step: float) -> PolyCurve:
    if tails > 0:
        centroid = pts.mean(axis=0)
        head_dir = pts[-1] - centroid
        head_dir /= np.linalg.norm(head_dir)
        leg_dir = pts[0] - centroid
        leg_dir /= np.linalg.norm(leg_dir)
        steps = np.arange(1, tails + 1)[:, None] * tail_step
        front = pts[0] + steps * leg_dir      # ordered knot -> outward
        back = pts[-1] + steps * head_dir
        pts = np.vstack([front[::-1], pts, back])
    return PolyCurve(pts)


def granny_curve(separation: float = 7.0) -> PolyCurve:
    """Connected sum of two trefoils laid end to end along x."""
    a = open_trefoil(n=80, gap=0.45).vertices
    b = open_trefoil(n=80, gap=0.45).vertices
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    b = b + np.array([separation, 0.0, 0.0])
    bridge = np.linspace(a[-1], b[0], 6)[1:-1]
    pts = np.vstack([a, bridge, b])
    return PolyCurve(pts)


def slipknot_curve(n: int = 70, offset: float = 0.22, exit_len: float = 10.0) -> PolyCurve:
    """A slipknot: a bight (hairpin fold) tied into a trefoil.

    The doubled strand retraces the knot path with a small offset, so the
    full curve pulls free, while the first pass alone is a deep trefoil.
    """
    fwd = open_trefoil(n=n, gap=0.5).vertices
    centroid = fwd.mean(axis=0)
    # hairpin: come back along the same path, nudged outward
    away = fwd - centroid
    away /= np.linalg.norm(away, axis=1, keepdims=True)
    back = (fwd + offset * away)[::-1]
    turn = np.linspace(fwd[-1], back[0], 4)[1:-1]
    exit_dir = back[-1] - centroid
    exit_dir /= np.linalg.norm(exit_dir)
    tail = back[-1] + np.arange(1, int(exit_len / 0.5) + 1)[:, None] * 0.5 * exit_dir
    pts = np.vstack([fwd, turn, back, tail])
    return PolyCurve(pts)


def torus_curve(p: int, q: int, n: int = 160, R: float = 2.0, r: float = 1.0,
                closed: bool = True) -> np.ndarray:
    """(p, q) torus knot vertex array (closed: last vertex omitted)."""
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    cx = (R + r * np.cos(q * t)) * np.cos(p * t)
    cy = (R + r * np.cos(q * t)) * np.sin(p * t)
    cz = r * np.sin(q * t)
    return np.column_stack([cx, cy, cz])


def random_open_walk(n: int, seed, step: float = 1.0, stiffness: float = 0.0) -> PolyCurve:
    """Random open polyline; ``stiffness`` in [0, 1) biases toward straight."""
    rng = np.random.default_rng(seed)
    steps = rng.standard_normal((n - 1, 3))
    steps /= np.linalg.norm(steps, axis=1, keepdims=True)
    if stiffness > 0:
        for i in range(1, n - 1):
            steps[i] = steps[i] + stiffness / (1 - stiffness) * steps[i - 1]
            steps[i] /= np.linalg.norm(steps[i])
    pts = np.vstack([[0.0, 0.0, 0.0], np.cumsum(step * steps, axis=0)])
    return PolyCurve(pts)


class _BraidBuilder:
    """Lay out braid strands as 3D polylines, one letter per unit height."""

    def __init__(self, n_strands: int):
        self.n = n_strands
        self.paths = [[np.array([float(k), 0.0, 0.0])] for k in range(n_strands)]
        self.slot_of = list(range(n_strands))   # strand index occupying each slot
        self.y = 0.0

    def letter(self, i: int, positive: bool) -> None:
        """Cross slots i, i+1; ``positive`` puts the slot-i strand on top."""
        if not 0 <= i < self.n - 1:
            raise InvalidArgument(f"letter index {i} out of range")
        y0, y1 = self.y, self.y + 1.0
        mid = 0.5 * (y0 + y1)
        s_a = self.slot_of[i]
        s_b = self.slot_of[i + 1]
        za = _CROSS_LIFT if positive else -_CROSS_LIFT
        self.paths[s_a].append(np.array([i + 0.5, mid, za]))
        self.paths[s_a].append(np.array([float(i + 1), y1, 0.0]))
        self.paths[s_b].append(np.array([i + 0.5, mid, -za]))
        self.paths[s_b].append(np.array([float(i), y1, 0.0]))
        for k in range(self.n):
            if k not in (i, i + 1):
                self.paths[self.slot_of[k]].append(np.array([float(k), y1, 0.0]))
        self.slot_of[i], self.slot_of[i + 1] = s_b, s_a
        self.y = y1

    def strand_path(self, strand: int) -> np.ndarray:
        return np.array(self.paths[strand])


def _braid_paths(word, n_strands: int):
    builder = _BraidBuilder(n_strands)
    for letter in word:
        if letter == 0:
            raise InvalidArgument("braid letters are nonzero signed integers")
        builder.letter(abs(letter) - 1, letter > 0)
    return builder


def braid_trace_closure(word, n_strands: int) -> np.ndarray:
    """Closed curve(s) from the trace closure of a braid word.

    Returns the vertex array of the single resulting component; raises if
    the closure has more than one component.
    """
    builder = _braid_paths(word, n_strands)
    y_top = builder.y
    perm = {k: builder.slot_of[k] for k in range(builder.n)}  # slot -> strand
    strand_at_bottom = list(range(builder.n))
    top_slot_of_strand = {perm[slot]: slot for slot in perm}

    pts: list[np.ndarray] = []
    visited = set()
    slot = 0
    while True:
        strand = strand_at_bottom[slot]
        if strand in visited:
            break
        visited.add(strand)
        path = builder.strand_path(strand)
        pts.extend(path)
        exit_slot = top_slot_of_strand[strand]
        # route around the braid on the left; lanes keyed by exit slot
        lane = 1.0 + exit_slot
        pts.append(np.array([float(exit_slot), y_top + lane, 0.0]))
        pts.append(np.array([-lane, y_top + lane, 0.0]))
        pts.append(np.array([-lane, -lane, 0.0]))
        pts.append(np.array([float(exit_slot), -lane, 0.0]))
        slot = exit_slot
        if slot == 0:
            break
    if len(visited) != builder.n:
        raise InvalidArgument("trace closure is a link, not a knot")
    return np.array(pts)


def plat_closure_curve(word, n_strands: int = 4) -> np.ndarray:
    """Closed curve from the plat closure (pair up slots 0-1, 2-3, ...).

    Strand k starts at bottom slot k.  The walk goes up a strand, across a
    top arc to the mate slot, down that strand, across a bottom arc, and so
    on until it closes; all arcs join adjacent slots so they add no
    crossings.
    """
    if n_strands % 2 != 0:
        raise InvalidArgument("plat closure needs an even strand count")
    builder = _braid_paths(word, n_strands)
    y_top = builder.y
    strand_at_top = {slot: builder.slot_of[slot] for slot in range(builder.n)}
    top_slot_of_strand = {strand: slot for slot, strand in strand_at_top.items()}

    def mate(slot: int) -> int:
        return slot + 1 if slot % 2 == 0 else slot - 1

    def arc_points(x_from: int, x_to: int, y_level: float):
        dx = x_to - x_from
        return [np.array([x_from + 0.15 * dx, y_level, 0.0]),
                np.array([x_from + 0.85 * dx, y_level, 0.0])]

    pts: list[np.ndarray] = []
    used = set()
    slot = 0
    while True:
        strand_up = slot
        if strand_up in used:
            raise InvalidArgument("plat closure is a link, not a knot")
        used.add(strand_up)
        pts.extend(builder.strand_path(strand_up))
        exit_slot = top_slot_of_strand[strand_up]
        top_mate = mate(exit_slot)
        pts.extend(arc_points(exit_slot, top_mate, y_top + 0.7))
        strand_down = strand_at_top[top_mate]
        if strand_down in used:
            raise InvalidArgument("plat closure is a link, not a knot")
        used.add(strand_down)
        pts.extend(builder.strand_path(strand_down)[::-1])
        bottom_slot = strand_down
        next_slot = mate(bottom_slot)
        if next_slot == 0:
            if len(used) != builder.n:
                raise InvalidArgument("plat closure is a link, not a knot")
            pts.extend(arc_points(bottom_slot, next_slot, -0.7))
            return np.array(pts)
        pts.extend(arc_points(bottom_slot, next_slot, -0.7))
        slot = next_slot


def _odd_length_twists(twists) -> list[int]:
    """Rewrite a positive continued-fraction vector to odd length.

    ``[..., a]`` with even length becomes ``[..., a - 1, 1]`` (or folds a
    trailing 1 into its neighbour); the represented fraction is unchanged
    and so is the total twist count.
    """
    t = [int(a) for a in twists]
    if any(a <= 0 for a in t):
        raise InvalidArgument("twist counts must be positive")
    if len(t) % 2 == 0:
        if t[-1] >= 2:
            t = t[:-1] + [t[-1] - 1, 1]
        else:
            t = t[:-2] + [t[-2] + 1]
    return t


def rational_plat_word(twists) -> list[int]:
    """4-plat braid word for a continued-fraction twist vector.

    Twist regions alternate between the middle strand pair and the first
    pair (with alternating handedness, giving an alternating diagram);
    odd-length vectors close to a knot under the standard plat pairing.
    """
    word: list[int] = []
    for level, a in enumerate(_odd_length_twists(twists)):
        if level % 2 == 0:
            word.extend([2] * a)
        else:
            word.extend([-1] * a)
    return word


def continued_fraction_numerator(twists) -> int:
    """Numerator p of ``a1 + 1/(a2 + 1/(...))`` (the knot determinant)."""
    from fractions import Fraction

    value = Fraction(int(twists[-1]))
    for a in reversed(list(twists)[:-1]):
        value = int(a) + 1 / value
    return abs(value.numerator)


def rational_knot_curve(twists) -> np.ndarray:
    """Closed curve of the two-bridge knot with the given twist vector."""
    return plat_closure_curve(rational_plat_word(twists), n_strands=4)


def connected_sum(curve_a: np.ndarray, curve_b: np.ndarray, gap: float = 4.0) -> np.ndarray:
    """Connected sum of two closed curves laid out side by side along x.

    Cuts the rightmost edge of ``a`` and the leftmost edge of ``b`` and
    splices with two nearly parallel bridges across the gap.
    """
    a = np.asarray(curve_a, dtype=float)
    b = np.asarray(curve_b, dtype=float)
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    shift = a[:, 0].max() - b[:, 0].min() + gap
    b = b + np.array([shift, 0.0, 0.0])
    ia = int(np.argmax(a[:, 0]))           # cut edge (ia, ia+1) of a
    ib = int(np.argmin(b[:, 0]))           # cut edge (ib, ib+1) of b
    a_seq = np.roll(a, -(ia + 1), axis=0)  # a[ia+1] ... a[ia]
    b_seq = np.roll(b, -(ib + 1), axis=0)  # b[ib+1] ... b[ib]
    # implicit bridges: a[ia] -> b[ib+1] inside, b[ib] -> a[ia+1] as closure
    return np.vstack([a_seq, b_seq])
