"""Combinatorial sphere embeddings of Gauss diagrams.

A signed Gauss code determines a rotation system: the counterclockwise order
of the four strand-ends around every crossing follows from the crossing sign.
Tracing face orbits of that rotation system gives the number of regions, and
Euler's formula ``V - E + F = 2`` holds exactly when the code is realizable
as a diagram on the sphere.  This is used both to validate generated codes
and to locate triangular faces for slide (R3) moves.

Dart encoding: arc ``i`` (strand order) owns darts ``2i`` (tail end, at the
earlier vertex) and ``2i + 1`` (head end, at the later vertex).
"""

from __future__ import annotations

from .diagram import GaussDiagram


def _tail(arc: int) -> int:
    return 2 * arc


def _head(arc: int) -> int:
    return 2 * arc + 1


class PlanarMap:
    """Rotation system of a diagram plus derived face structure."""

    __slots__ = ("diagram", "n_arcs", "rotations", "dart_vertex", "faces", "_dart_arc")

    def __init__(self, diagram: GaussDiagram):
        self.diagram = diagram
        code = diagram.code
        n = diagram.n_crossings
        closed = diagram.closed
        self.n_arcs = 2 * n if closed else 2 * n + 1

        passes: dict[int, dict] = {}
        for pos, (cid, over, sign) in enumerate(code):
            rec = passes.setdefault(cid, {"sign": sign})
            rec["over" if over else "under"] = pos

        def out_arc(pos: int) -> int:
            return (pos + 1) % self.n_arcs if closed else pos + 1

        rotations: list[list[int]] = []
        dart_vertex: dict[int, int] = {}
        for cid in sorted(passes):
            rec = passes[cid]
            p, q, sign = rec["over"], rec["under"], rec["sign"]
            o_in, o_out = _head(p), _tail(out_arc(p))
            u_in, u_out = _head(q), _tail(out_arc(q))
            if sign > 0:
                rot = [o_out, u_out, o_in, u_in]
            else:
                rot = [o_out, u_in, o_in, u_out]
            vid = len(rotations)
            rotations.append(rot)
            for d in rot:
                dart_vertex[d] = vid
        if not closed:
            # endpoint vertices: leg owns the tail of arc 0, head the last arc head
            leg = [_tail(0)]
            head = [_head(self.n_arcs - 1)]
            for rot in (leg, head):
                vid = len(rotations)
                rotations.append(rot)
                dart_vertex[rot[0]] = vid
        self.rotations = rotations
        self.dart_vertex = dart_vertex
        self._dart_arc = {d: d // 2 for d in dart_vertex}
        self.faces = self._trace_faces()

    @property
    def n_vertices(self) -> int:
        return len(self.rotations)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_arcs + self.n_faces

    def is_spherical(self) -> bool:
        return self.euler_characteristic() == 2

    def _next_in_rotation(self, dart: int) -> int:
        rot = self.rotations[self.dart_vertex[dart]]
        i = rot.index(dart)
        return rot[(i + 1) % len(rot)]

    def _trace_faces(self) -> list[tuple[int, ...]]:
        faces = []
        visited: set[int] = set()
        for start in sorted(self.dart_vertex):
            if start in visited:
                continue
            face = []
            d = start
            while True:
                face.append(d)
                visited.add(d)
                d = self._next_in_rotation(d ^ 1)  # cross the edge, turn at vertex
                if d == start:
                    break
            faces.append(tuple(face))
        return faces

    def triangle_moves(self) -> list[tuple[tuple[int, int], tuple[int, int], tuple[int, int]]]:
        """Slide moves available on triangular faces.

        Each move is returned as three disjoint pairs of code positions to be
        transposed.  A triangle admits the slide when one of its sides passes
        over both of its end crossings or under both (the strand that can be
        carried across the opposite crossing).
        """
        code = self.diagram.code
        closed = self.diagram.closed
        n_code = len(code)
        crossing_vertices = self.n_vertices - (0 if closed else 2)
        moves = []
        for face in self.faces:
            if len(face) != 3:
                continue
            arcs = [self._dart_arc[d] for d in face]
            verts = [self.dart_vertex[d] for d in face]
            if len(set(arcs)) != 3 or len(set(verts)) != 3:
                continue
            if any(v >= crossing_vertices for v in verts):
                continue  # touches an endpoint
            pairs = []
            ok = True
            slideable = False
            for arc in arcs:
                if closed:
                    i, j = (arc - 1) % n_code, arc % n_code
                else:
                    i, j = arc - 1, arc
                    if i < 0 or j >= n_code:
                        ok = False
                        break
                pairs.append((i, j))
                if code[i][1] == code[j][1]:
                    slideable = True  # over both or under both
            if not ok or not slideable:
                continue
            used = [p for pr in pairs for p in pr]
            if len(set(used)) != 6:
                continue
            moves.append(tuple(sorted(pairs)))
        # deterministic order, no duplicates
        return sorted(set(moves))


def is_realizable(diagram: GaussDiagram) -> bool:
    """True when the signed code embeds on the sphere (genus zero)."""
    if diagram.n_crossings == 0:
        return True
    return PlanarMap(diagram).is_spherical()
