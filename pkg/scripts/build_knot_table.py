#!/usr/bin/env python3
"""Generate the bundled knot classification table.

Prime knots through seven crossings are built as 4-plat closures of
positive continued-fraction twist vectors; each construction is verified
against the continued-fraction determinant and the expected minimal
crossing count of its reduced alternating diagram before its invariants
are frozen.  Composite entries get determinants and bracket fingerprints
by multiplicativity, with one row per chirality-blind fingerprint class.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from knotsteer.curves import continued_fraction_numerator, rational_knot_curve
from knotsteer.geometry import PolyCurve
from knotsteer.knot_id import KnotType, classify_family, knot_determinant, write_knot_table
from knotsteer.knotoids.bracket import Laurent, normalized_bracket
from knotsteer.knotoids.diagram import extract_for_direction
from knotsteer.knotoids.moves import deep_simplify

VERSION = "1"

PRIME_TWISTS = {
    "3_1": ([3], 3),
    "4_1": ([2, 2], 4),
    "5_1": ([5], 5),
    "5_2": ([3, 2], 5),
    "6_1": ([4, 2], 6),
    "6_2": ([3, 1, 2], 6),
    "6_3": ([2, 1, 1, 2], 6),
    "7_1": ([7], 7),
    "7_2": ([5, 2], 7),
    "7_3": ([4, 3], 7),
    "7_4": ([3, 1, 3], 7),
    "7_5": ([3, 2, 2], 7),
    "7_6": ([2, 2, 1, 2], 7),
    "7_7": ([2, 1, 1, 1, 2], 7),
}


def symmetrized(poly: Laurent) -> str:
    return min(poly.serialize(), poly.mirror().serialize())


def main() -> None:
    rng = np.random.default_rng(2024)
    direction = np.array([0.0131, 0.0197, 1.0])
    direction /= np.linalg.norm(direction)

    entries = [KnotType(name="0_1", determinant=1, fingerprint="0:1",
                        family="unknot", source="construction")]
    brackets: dict[str, Laurent] = {}
    for name, (twists, crossings) in PRIME_TWISTS.items():
        curve = PolyCurve(rational_knot_curve(twists))
        diagram = deep_simplify(extract_for_direction(curve, direction, rng, closed=True))
        det = knot_determinant(diagram)
        p = continued_fraction_numerator(twists)
        assert det == p, f"{name}: determinant {det} != continued fraction {p}"
        assert diagram.n_crossings == crossings, \
            f"{name}: reduced to {diagram.n_crossings}, expected {crossings}"
        assert all(diagram.code[i][1] != diagram.code[i + 1][1]
                   for i in range(len(diagram.code) - 1)), f"{name}: not alternating"
        poly = normalized_bracket(diagram)
        brackets[name] = poly
        entries.append(KnotType(name=name, determinant=det,
                                fingerprint=symmetrized(poly),
                                family=classify_family(name), source="construction"))
        print(f"{name}: det={det} crossings={crossings} fp={symmetrized(poly)[:40]}...")

    p3 = brackets["3_1"]
    m3 = p3.mirror()
    p4 = brackets["4_1"]
    assert p4.mirror() == p4 or symmetrized(p4) == symmetrized(p4.mirror())

    composites = [
        ("3_1#3_1", 9, [p3 * p3]),            # square knot key added below
        ("3_1#3_1", 9, [p3 * m3]),
        ("3_1#4_1", 15, [p3 * p4]),
        ("3_1#3_1#3_1", 27, [p3 * p3 * p3]),
        ("3_1#3_1#3_1", 27, [p3 * p3 * m3]),
    ]
    seen = {e.fingerprint for e in entries}
    for name, det, polys in composites:
        for poly in polys:
            key = symmetrized(poly)
            if key in seen:
                continue
            seen.add(key)
            entries.append(KnotType(name=name, determinant=det, fingerprint=key,
                                    family="composite", source="product"))
            print(f"{name}: det={det} fp={key[:40]}...")

    keys = [e.fingerprint for e in entries]
    assert len(keys) == len(set(keys)), "fingerprint collision in knot table"

    out = Path(__file__).resolve().parents[1] / "src" / "knotsteer" / "data" / "knot_table.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_knot_table(out, entries, VERSION)
    print(f"wrote {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()
