"""Breadth-first search for the unravelling number of a knotoid diagram.

States are deep-simplified diagrams; one search edge applies a forbidden
move (sliding an endpoint across its adjacent crossing strand, which deletes
that crossing) at either end, with free Reidemeister simplification in
between.  The search returns the minimal number of forbidden moves to reach
the trivial diagram, or None when ``max_depth`` is exhausted.

Only crossing-removing endpoint slides are searched, so the result is an
upper bound for the unravelling number in full generality; for the small
diagrams this oracle is used on, the bound is what the bundled table records.
"""

from __future__ import annotations

import math

from ..errors import InvalidArgument
from .diagram import GaussDiagram
from .moves import deep_simplify, forbidden_deletions

_SEARCH_CROSSING_CAP = 10


def brute_force_unravel(diagram: GaussDiagram, max_depth: int = 8) -> int | None:
    """Minimal forbidden-move count to the trivial knotoid, or None."""
    if diagram.closed:
        raise InvalidArgument("unravelling is defined for open diagrams")
    if diagram.n_crossings > _SEARCH_CROSSING_CAP:
        raise InvalidArgument(
            f"search oracle restricted to <= {_SEARCH_CROSSING_CAP} crossings")
    start = deep_simplify(diagram)
    if start.n_crossings == 0:
        return 0
    frontier = {start.key(): start}
    visited = set(frontier)
    for depth in range(1, max_depth + 1):
        next_frontier: dict = {}
        for diag in frontier.values():
            for moved in forbidden_deletions(diag):
                reduced = deep_simplify(moved)
                if reduced.n_crossings == 0:
                    return depth
                key = reduced.key()
                if key not in visited:
                    visited.add(key)
                    next_frontier[key] = reduced
        if not next_frontier:
            return None
        frontier = next_frontier
    return None


def unravel_bound(diagram: GaussDiagram) -> int:
    """Heuristic complexity for diagrams outside the bundled table.

    ``ceil(c / 3)`` of the simplified crossing count: a crude monotone
    proxy used only when classification fails, not a computed invariant.
    """
    reduced = simplify_for_bound(diagram)
    return math.ceil(reduced / 3)


def simplify_for_bound(diagram: GaussDiagram) -> int:
    from .moves import simplify

    return simplify(diagram).n_crossings


def greedy_unravel(diagram: GaussDiagram, move_cap: int = 64) -> int:
    """Forbidden-move count of a greedy unravelling (upper bound on u).

    Repeatedly applies the endpoint slide whose deep-simplified result is
    smallest.  Unlike a raw crossing count, superficial tangles cascade
    away in a handful of moves while genuinely threaded diagrams resist,
    so this stays a topological complexity signal for diagrams too big to
    fingerprint.
    """
    current = deep_simplify(diagram)
    moves = 0
    while current.n_crossings and moves < move_cap:
        options = [deep_simplify(d) for d in forbidden_deletions(current)]
        current = min(options, key=lambda d: d.n_crossings)
        moves += 1
    return moves
