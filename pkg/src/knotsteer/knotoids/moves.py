"""Reidemeister simplification and endpoint (forbidden) moves on Gauss codes.

All moves here act away from the endpoints: adjacency is linear for open
diagrams (never wrapping past leg or head) and cyclic for closed ones.
``simplify`` applies crossing-decreasing R1/R2 moves to a fixed point;
``deep_simplify`` additionally explores slide (R3) moves through the sphere
embedding to unlock further R1/R2 reductions.  Forbidden moves — sliding the
strand adjacent to an endpoint across the crossing next to it — are the edit
steps counted by the unravelling search.
"""

from __future__ import annotations

from .diagram import GaussDiagram
from .planar_map import PlanarMap


def _adjacent_pairs(n_code: int, closed: bool):
    if closed:
        return [(i, (i + 1) % n_code) for i in range(n_code)] if n_code > 1 else []
    return [(i, i + 1) for i in range(n_code - 1)]


def _remove_crossings(code, ids: set[int]):
    return [v for v in code if v[0] not in ids]


def _reduce_code(code: list, closed: bool) -> list:
    """Crossing-decreasing R1/R2 fixed point on a raw visit list."""
    code = list(code)
    changed = True
    while changed and code:
        changed = False
        pairs = _adjacent_pairs(len(code), closed)
        for i, j in pairs:
            if code[i][0] == code[j][0]:  # kink: both passes of one crossing
                code = _remove_crossings(code, {code[i][0]})
                changed = True
                break
        if changed:
            continue
        # bigon: one strand over crossings {x, y} consecutively, the other
        # under them consecutively, with opposite crossing signs
        seen: dict[frozenset, tuple[bool, int, int]] = {}
        for i, j in pairs:
            ci, oi, si = code[i]
            cj, oj, sj = code[j]
            if ci == cj or oi != oj or si != -sj:
                continue
            ids = frozenset((ci, cj))
            if ids in seen:
                o_prev, pi, pj = seen[ids]
                if o_prev != oi and len({i, j, pi, pj}) == 4:
                    code = _remove_crossings(code, ids)
                    changed = True
                    break
            else:
                seen[ids] = (oi, i, j)
    return code


def simplify(diagram: GaussDiagram) -> GaussDiagram:
    """Fixed point of crossing-decreasing R1/R2 moves away from endpoints."""
    reduced = _reduce_code(list(diagram.code), diagram.closed)
    return GaussDiagram._trusted(reduced, diagram.closed).relabeled()


def perform_r3(diagram: GaussDiagram, move) -> GaussDiagram:
    """Transpose the three adjacent visit pairs of a triangle slide."""
    code = list(diagram.code)
    for i, j in move:
        code[i], code[j] = code[j], code[i]
    return GaussDiagram._trusted(code, diagram.closed)


def _r3_state_budget(n_crossings: int) -> int:
    # classification gives up past the fingerprint budget, but reducing
    # mid-size diagrams below it keeps the complexity signal topological
    # instead of a raw crossing count
    if n_crossings <= 10:
        return 48
    if n_crossings <= 14:
        return 24
    if n_crossings <= 22:
        return 12
    return 0


def deep_simplify(diagram: GaussDiagram, max_states: int | None = None) -> GaussDiagram:
    """R1/R2 reduction helped by bounded exploration of triangle slides.

    Classification-equivalent to the input; returns the smallest diagram
    found.  The R3 search budget shrinks with crossing count (big diagrams
    fall back to the heuristic complexity anyway) so the cost stays small
    and deterministic.
    """
    best = simplify(diagram)
    while best.n_crossings >= 3:
        budget = max_states if max_states is not None else _r3_state_budget(best.n_crossings)
        if budget == 0:
            break
        improved = None
        seen = {best.key()}
        queue = [best]
        while queue and improved is None and len(seen) < budget:
            current = queue.pop(0)
            for move in PlanarMap(current).triangle_moves():
                candidate = simplify(perform_r3(current, move))
                key = candidate.key()
                if key in seen:
                    continue
                seen.add(key)
                if candidate.n_crossings < best.n_crossings:
                    improved = candidate
                    break
                queue.append(candidate)
        if improved is None:
            break
        best = improved
    return best.relabeled()


def forbidden_deletions(diagram: GaussDiagram) -> list[GaussDiagram]:
    """Results of sliding an endpoint across its adjacent crossing strand.

    Pulling the leg (or head) past the first (last) crossing removes that
    crossing: one forbidden move.  Closed diagrams have no endpoints and
    return an empty list.
    """
    if diagram.closed or not diagram.code:
        return []
    out = []
    ids = {diagram.code[0][0]}
    out.append(GaussDiagram._trusted(_remove_crossings(diagram.code, ids), False))
    tail_id = diagram.code[-1][0]
    if tail_id not in ids:
        out.append(GaussDiagram._trusted(_remove_crossings(diagram.code, {tail_id}), False))
    return out


def insert_r1(diagram: GaussDiagram, arc: int, over_first: bool, sign: int,
              new_id: int | None = None) -> GaussDiagram:
    """Insert a kink on arc ``arc`` (always a planar move)."""
    code = list(diagram.code)
    n_arcs = len(code) if diagram.closed else len(code) + 1
    if not 0 <= arc < n_arcs:
        raise ValueError(f"arc {arc} out of range")
    cid = new_id if new_id is not None else (max((c for c, _, _ in code), default=-1) + 1)
    pair = [(cid, over_first, sign), (cid, not over_first, sign)]
    pos = arc if not diagram.closed else arc
    return GaussDiagram(code[:pos] + pair + code[pos:], closed=diagram.closed)


def _arcs_of_face(pmap: PlanarMap, face) -> list[int]:
    return sorted({d // 2 for d in face})


def insert_r2(diagram: GaussDiagram, rng) -> GaussDiagram | None:
    """Insert a cancelling crossing pair across a randomly chosen face.

    The two new crossings are pushed between two distinct arcs bounding a
    common region, so the move is geometrically valid; candidate entry
    orders and signs are filtered through the sphere-embedding check.
    Returns None when the chosen face has fewer than two arcs.
    """
    pmap = PlanarMap(diagram)
    faces = [f for f in pmap.faces if len(_arcs_of_face(pmap, f)) >= 2]
    if not faces:
        return None
    face = faces[int(rng.integers(len(faces)))]
    arcs = _arcs_of_face(pmap, face)
    pick = rng.choice(len(arcs), size=2, replace=False)
    arc_a, arc_b = int(arcs[min(pick)]), int(arcs[max(pick)])
    base = max((c for c, _, _ in diagram.code), default=-1) + 1
    x, y = base, base + 1
    variants = []
    for over in (True, False):
        for s in (1, -1):
            first = [(x, over, s), (y, over, -s)]
            for swap in (False, True):
                if swap:
                    second = [(x, not over, s), (y, not over, -s)]
                else:
                    second = [(y, not over, -s), (x, not over, s)]
                variants.append((first, second))
    order = rng.permutation(len(variants))
    code = list(diagram.code)
    from .planar_map import is_realizable
    baseline = simplify(diagram).n_crossings
    for k in order:
        first, second = variants[int(k)]
        new_code = (code[:arc_a] + first + code[arc_a:arc_b]
                    + second + code[arc_b:])
        cand = GaussDiagram(new_code, closed=diagram.closed)
        if not is_realizable(cand):
            continue
        if simplify(cand).n_crossings == baseline:
            return cand
    return None
