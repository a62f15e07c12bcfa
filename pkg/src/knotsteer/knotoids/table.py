"""Knotoid type table: fingerprint -> (name, unravelling number).

The table ships as a versioned CSV asset generated by
``scripts/build_knotoid_table.py``: open diagrams with up to five crossings
are enumerated exhaustively (six-crossing coverage is sampled), grouped by
their chirality-blind bracket fingerprint, and the unravelling number of a
minimal representative is computed with the forbidden-move search.  Names
follow ``k<crossings>.<index>``; the zero-crossing class is ``trivial``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import ComplexityLimit, InvalidArgument
from .bracket import TRIVIAL_FINGERPRINT, fingerprint
from .diagram import GaussDiagram
from .moves import deep_simplify

TRIVIAL_NAME = "trivial"
UNCLASSIFIED_NAME = "unclassified"

# State sums are exponential in crossing count; past this size the table
# cannot match anyway (entries have <= 6 crossings), so classification
# falls back to a heuristic unravelling estimate.
DEFAULT_FINGERPRINT_BUDGET = 14

# greedy endpoint-slide estimate up to this size; beyond it a saturated
# crossing-count proxy (saturation keeps raw diagram density from
# outweighing genuine entanglement in the steering signal)
GREEDY_FALLBACK_BUDGET = 24
FALLBACK_SATURATION = 8


@dataclass(frozen=True)
class KnotoidType:
    name: str
    fingerprint: str
    unravelling: int
    crossings: int
    source: str = "derived"

    @property
    def is_trivial(self) -> bool:
        return self.name == TRIVIAL_NAME

    @property
    def classified(self) -> bool:
        return self.name != UNCLASSIFIED_NAME


class KnotoidTable:
    """Immutable fingerprint-keyed lookup of knotoid types."""

    def __init__(self, entries):
        by_key: dict[str, KnotoidType] = {}
        for e in entries:
            if e.fingerprint in by_key:
                raise InvalidArgument(
                    f"duplicate fingerprint for {e.name} and {by_key[e.fingerprint].name}")
            by_key[e.fingerprint] = e
        if TRIVIAL_FINGERPRINT not in by_key:
            raise InvalidArgument("table must contain the trivial type")
        trivial = by_key[TRIVIAL_FINGERPRINT]
        if trivial.unravelling != 0:
            raise InvalidArgument("trivial type must have unravelling number 0")
        self._by_key = by_key
        self.trivial = trivial

    def __len__(self) -> int:
        return len(self._by_key)

    def __iter__(self):
        return iter(self._by_key.values())

    def get(self, key: str) -> KnotoidType | None:
        return self._by_key.get(key)

    def max_unravelling(self) -> int:
        return max(e.unravelling for e in self._by_key.values())


def write_table(path, entries, version: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# knotoid table version {version}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "fingerprint", "unravelling_number", "crossings", "source"])
        for e in sorted(entries, key=lambda t: (t.crossings, t.name)):
            writer.writerow([e.name, e.fingerprint, e.unravelling, e.crossings, e.source])


def read_table(path_or_file) -> KnotoidTable:
    def parse(fh):
        entries = []
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        expected = ["name", "fingerprint", "unravelling_number", "crossings", "source"]
        if header != expected:
            raise InvalidArgument(f"unexpected table header {header}")
        for name, key, u, crossings, source in rows:
            entries.append(KnotoidType(name=name, fingerprint=key,
                                       unravelling=int(u), crossings=int(crossings),
                                       source=source))
        return KnotoidTable(entries)

    if hasattr(path_or_file, "read"):
        return parse(path_or_file)
    with open(path_or_file, "r", encoding="utf-8") as fh:
        return parse(fh)


@lru_cache(maxsize=1)
def bundled_table() -> KnotoidTable:
    ref = resources.files("knotsteer").joinpath("data/knotoid_table.csv")
    with ref.open("r", encoding="utf-8") as fh:
        return read_table(fh)


def _heuristic_type(reduced, key: str = "") -> KnotoidType:
    """Complexity estimate for diagrams the table cannot name.

    Up to GREEDY_FALLBACK_BUDGET crossings: count greedy endpoint slides
    (superficial tangles cascade away, threaded cores resist).  Beyond
    that: the crossing-count proxy, saturated so density alone cannot
    dominate genuinely entangled candidates.
    """
    from .unravel import greedy_unravel

    n = reduced.n_crossings
    if n <= GREEDY_FALLBACK_BUDGET:
        u = greedy_unravel(reduced)
    else:
        u = min(math.ceil(n / 3), FALLBACK_SATURATION)
    return KnotoidType(name=UNCLASSIFIED_NAME, fingerprint=key,
                       unravelling=u, crossings=n, source="heuristic")


_classify_cache: dict[tuple, KnotoidType] = {}
_CLASSIFY_CACHE_MAX = 200_000


def classify(diagram: GaussDiagram, table: KnotoidTable | None = None,
             budget: int = DEFAULT_FINGERPRINT_BUDGET) -> KnotoidType:
    """Simplify, fingerprint and look up a knotoid diagram.

    Unknown fingerprints and diagrams beyond the state-sum budget come back
    as an ``unclassified`` type whose unravelling number is the heuristic
    bound ``ceil(crossings / 3)``.
    """
    if table is None:
        table = bundled_table()
    reduced = deep_simplify(diagram)
    n = reduced.n_crossings
    if n == 0:
        return table.trivial
    cache_key = (reduced.key(), budget, id(table))
    hit = _classify_cache.get(cache_key)
    if hit is not None:
        return hit
    if n > budget:
        result = _heuristic_type(reduced)
    else:
        try:
            key = fingerprint(reduced, budget=budget)
        except ComplexityLimit:
            result = _heuristic_type(reduced)
        else:
            entry = table.get(key)
            result = entry if entry is not None else _heuristic_type(reduced, key)
    if len(_classify_cache) >= _CLASSIFY_CACHE_MAX:
        _classify_cache.clear()
    _classify_cache[cache_key] = result
    return result
