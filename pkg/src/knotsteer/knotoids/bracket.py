"""Kauffman bracket state sums for open and closed Gauss diagrams.

Each crossing is smoothed two ways (A / B); a state is a choice of smoothing
at every crossing.  For a closed diagram a state is a disjoint union of
loops contributing ``d = -A^2 - A^-2`` per loop beyond the first; for an
open diagram the strand component contributes a factor 1 and every closed
loop contributes ``d``.  The writhe-normalised sum ``(-A^3)^(-w) <D>`` is
invariant under Reidemeister moves performed away from the endpoints (on
the sphere), which is what classification keys on.

The reconnection rule in terms of the strand-arc indices around a crossing
(over pass p, under pass q, arcs ``in = k``, ``out = k+1``):

=========  ============================  ============================
sign       A-smoothing joins             B-smoothing joins
=========  ============================  ============================
``+1``     (p, q+1), (p+1, q)            (p, q), (p+1, q+1)
``-1``     (p, q), (p+1, q+1)            (p, q+1), (p+1, q)
=========  ============================  ============================
"""

from __future__ import annotations

from ..errors import ComplexityLimit
from .diagram import GaussDiagram

DEFAULT_CROSSING_BUDGET = 24


class Laurent:
    """Sparse integer Laurent polynomial in one variable A."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, int] | None = None):
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def unit(cls) -> "Laurent":
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "Laurent":
        return cls({exponent: coeff})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Laurent) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other: "Laurent") -> "Laurent":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return Laurent(out)

    def __mul__(self, other: "Laurent") -> "Laurent":
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                k = e1 + e2
                out[k] = out.get(k, 0) + c1 * c2
        return Laurent(out)

    def scale(self, exponent: int, coeff: int = 1) -> "Laurent":
        return Laurent({e + exponent: c * coeff for e, c in self.coeffs.items()})

    def mirror(self) -> "Laurent":
        """Substitute A -> A^-1 (the mirror-image diagram's bracket)."""
        return Laurent({-e: c for e, c in self.coeffs.items()})

    def serialize(self) -> str:
        if not self.coeffs:
            return "0"
        return ";".join(f"{e}:{self.coeffs[e]}" for e in sorted(self.coeffs))

    @classmethod
    def parse(cls, text: str) -> "Laurent":
        if text == "0":
            return cls()
        out = {}
        for item in text.split(";"):
            e, c = item.split(":")
            out[int(e)] = int(c)
        return cls(out)

    def __repr__(self) -> str:
        return f"Laurent({self.serialize()})"


LOOP_FACTOR = Laurent({2: -1, -2: -1})


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def _pass_positions(diagram: GaussDiagram) -> list[tuple[int, int, int]]:
    """Per crossing: (over visit position, under visit position, sign)."""
    seen: dict[int, list] = {}
    for pos, (cid, over, sign) in enumerate(diagram.code):
        rec = seen.setdefault(cid, [None, None, sign])
        rec[0 if over else 1] = pos
    return [(rec[0], rec[1], rec[2]) for rec in seen.values()]


def _loops_of_state(passes, n_arcs: int, state: int, closed: bool, wrap: int) -> int:
    """Number of closed components of a smoothed state.

    Arc i enters visit i and arc i+1 leaves it; for closed diagrams arc
    indices wrap modulo ``wrap``.
    """
    uf = _UnionFind(n_arcs)
    for bit, (p, q, sign) in enumerate(passes):
        a_smooth = (state >> bit) & 1
        po = p + 1 if not closed else (p + 1) % wrap
        qo = q + 1 if not closed else (q + 1) % wrap
        if (sign > 0) == bool(a_smooth):
            uf.union(p, qo)
            uf.union(po, q)
        else:
            uf.union(p, q)
            uf.union(po, qo)
    roots = {uf.find(i) for i in range(n_arcs)}
    return len(roots)


def raw_bracket(diagram: GaussDiagram,
                budget: int = DEFAULT_CROSSING_BUDGET) -> Laurent:
    """Unnormalised bracket polynomial of a diagram by direct state sum."""
    n = diagram.n_crossings
    if n > budget:
        raise ComplexityLimit(f"{n} crossings exceeds state-sum budget {budget}")
    if n == 0:
        return Laurent.unit()
    passes = _pass_positions(diagram)
    closed = diagram.closed
    n_arcs = 2 * n if closed else 2 * n + 1
    loop_powers: dict[int, Laurent] = {0: Laurent.unit()}

    def loop_term(k: int) -> Laurent:
        if k not in loop_powers:
            loop_powers[k] = loop_term(k - 1) * LOOP_FACTOR
        return loop_powers[k]

    total = Laurent()
    for state in range(1 << n):
        comps = _loops_of_state(passes, n_arcs, state, closed, n_arcs)
        loops = comps - 1  # open: one strand component; closed: <unknot> = 1
        a_count = bin(state).count("1")
        exponent = 2 * a_count - n  # A^a * A^-(n-a)
        total = total + loop_term(loops).scale(exponent)
    return total


def normalized_bracket(diagram: GaussDiagram,
                       budget: int = DEFAULT_CROSSING_BUDGET) -> Laurent:
    """Writhe-normalised bracket ``(-A^3)^(-w) <D>``."""
    raw = raw_bracket(diagram, budget=budget)
    w = diagram.writhe()
    sign = 1 if w % 2 == 0 else -1
    return raw.scale(-3 * w, sign)


def fingerprint(diagram: GaussDiagram,
                budget: int = DEFAULT_CROSSING_BUDGET) -> str:
    """Chirality-blind invariant key: the normalised bracket, symmetrised
    over mirror images by taking the lexicographically smaller serialization."""
    poly = normalized_bracket(diagram, budget=budget)
    a = poly.serialize()
    b = poly.mirror().serialize()
    return min(a, b)


TRIVIAL_FINGERPRINT = Laurent.unit().serialize()
